"""Adiabatic tracking of the instantaneous elliptic fixed point.

Omega(t) = Omega0 sech(t/T) and the tracked population
p_track(t) = sin^2[arctan(sinh(t/T))/2 + pi/4] are prescribed; the detuning
follows from the fixed-point condition on the chosen alpha branch.
"""

import logging
import math
from typing import Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from resonance_control.config import Config
from resonance_control.control.pulses import Pulse, pulse_area
from resonance_control.model.core import ControlSample

logger = logging.getLogger(__name__)

__all__ = ["TrackingDesign", "TrackingPulse", "tracking_controls", "p_track", "pulse_area"]


class TrackingDesign(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    omega0: float = Field(10.0, gt=0)
    T: float = Field(1.0, gt=0)
    # alpha = 0 gives Delta(t_i) < 0 and approaches Delta/Omega -> 1 from below
    branch: Literal["zero", "pi"] = "zero"
    # static detuning shift Delta_s; ~0.5/T moves the pulse into a more robust region
    bias: float = Field(0.0, allow_inf_nan=False)

    @property
    def sign(self) -> float:
        return 1.0 if self.branch == "zero" else -1.0


def p_track(design: TrackingDesign, t: float) -> float:
    # sin^2[gd(x)/2 + pi/4] reduces to the logistic function of 2x
    return float(expit(2.0 * t / design.T))


def tracking_controls(design: TrackingDesign, t: float) -> Tuple[ControlSample, float]:
    """Controls and tracked population at time t.

    Uses 1 - p = expit(-2x), sech(x) = 2 sqrt(p (1-p)) and
    Omega / (2 sqrt(p)) = Omega0 sqrt(1-p), which stay finite for any t.
    """
    x = t / design.T
    p = float(expit(2.0 * x))
    q = float(expit(-2.0 * x))
    omega = 2.0 * design.omega0 * math.sqrt(p * q)
    delta = -design.sign * design.omega0 * math.sqrt(q) * (q - 2.0 * p) + design.bias
    return ControlSample(omega, delta), p


class TrackingPulse(Pulse):
    kind: Literal["tracking"] = "tracking"
    design: TrackingDesign = TrackingDesign()

    @property
    def T(self) -> float:
        return self.design.T

    def bare(self, t: float) -> ControlSample:
        return tracking_controls(self.design, t)[0]

    def default_span(self) -> Tuple[float, float]:
        half = Config.TRACKING_SPAN * self.design.T
        return (-half, half)

    def nominal_area(self) -> float:
        """pi Omega0 T, the area over the whole real line"""
        return math.pi * self.design.omega0 * self.design.T
