"""Pulse families and the systematic perturbation applied to them."""

import logging
import math
from abc import abstractmethod
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import quad

from resonance_control.config import Config
from resonance_control.model.core import ControlSample

logger = logging.getLogger(__name__)


class Perturbation(BaseModel):
    """Static detuning offset delta0 (1/T) and relative amplitude error beta"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    delta0: float = Field(0.0, allow_inf_nan=False)
    beta: float = Field(0.0, allow_inf_nan=False)

    @property
    def is_identity(self) -> bool:
        return self.delta0 == 0.0 and self.beta == 0.0

    def compose(self, other: "Perturbation") -> "Perturbation":
        return Perturbation(
            delta0=self.delta0 + other.delta0,
            beta=(1.0 + self.beta) * (1.0 + other.beta) - 1.0,
        )


class Pulse(BaseModel):
    """Time-dependent control pair (Omega(t), Delta(t)) with its perturbation.

    Subclasses implement `bare(t)`; calling the pulse applies
    Omega -> (1 + beta) Omega and Delta -> Delta + delta0.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    perturbation: Perturbation = Perturbation()

    @model_validator(mode="after")
    def _check_amplitude_factor(self):
        if 1.0 + self.perturbation.beta <= 0.0:
            raise ValueError("1 + beta must be positive")
        return self

    @abstractmethod
    def bare(self, t: float) -> ControlSample:
        """Unperturbed controls at time t"""

    @abstractmethod
    def default_span(self) -> Tuple[float, float]:
        """Integration window standing in for (-inf, +inf)"""

    def __call__(self, t: float) -> ControlSample:
        omega, delta = self.bare(t)
        pert = self.perturbation
        return ControlSample((1.0 + pert.beta) * omega, delta + pert.delta0)

    def breakpoints(self) -> list:
        """Times where the controls jump; quadrature splits there"""
        return []

    def describe(self) -> dict:
        return self.model_dump(mode="json")


class ZeroPulse(Pulse):
    kind: Literal["zero"] = "zero"
    T: float = Field(1.0, gt=0)

    def bare(self, t: float) -> ControlSample:
        return ControlSample(0.0, 0.0)

    def default_span(self) -> Tuple[float, float]:
        return (0.0, self.T)


class SquarePulse(Pulse):
    """Constant (omega, delta) switched on over [0, T].

    With delta = lambda_a and lambda_s = 0 this is the Rabi model, whose
    population follows tanh^2(omega t / 2) exactly.
    """

    kind: Literal["square"] = "square"
    omega: float = Field(math.pi, ge=0)
    delta: float = 0.0
    T: float = Field(1.0, gt=0)

    @classmethod
    def with_area(cls, area: float, T: float = 1.0, **kwargs) -> "SquarePulse":
        return cls(omega=area / T, T=T, **kwargs)

    def bare(self, t: float) -> ControlSample:
        if 0.0 <= t <= self.T:
            return ControlSample(self.omega, self.delta)
        return ControlSample(0.0, 0.0)

    def breakpoints(self) -> list:
        return [self.T]

    def default_span(self) -> Tuple[float, float]:
        return (0.0, self.T)


def pulse_area(pulse: Pulse, t_span: Optional[Tuple[float, float]] = None,
               tol: float = Config.AREA_TOL) -> float:
    """int Omega dt over the span by adaptive quadrature (perturbation included)"""
    t_i, t_f = t_span or pulse.default_span()
    points = [t for t in [0.0, *pulse.breakpoints()] if t_i < t < t_f] or None
    area, error = quad(lambda t: pulse(t)[0], t_i, t_f, epsabs=tol, epsrel=tol,
                       limit=500, points=points)
    logger.debug(f"pulse area {area:.12g} (quadrature error estimate {error:.2e})")
    return area
