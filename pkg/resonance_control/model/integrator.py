"""Adaptive Runge-Kutta integration of the equations of motion, plus the
closed-form population used to validate it."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import simpson, solve_ivp

from resonance_control.config import Config
from resonance_control.errors import StepSizeUnderflowError
from resonance_control.model.core import (
    DEFAULT_PARAMS,
    AmplitudeState,
    AngleState,
    ControlSample,
    SystemParams,
    amplitude_array_to_bloch,
    amplitude_field,
    angle_field,
)

logger = logging.getLogger(__name__)

VectorField = Callable[..., np.ndarray]


class IntegratorConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rel_tol: float = Field(default_factory=lambda: Config.REL_TOL, gt=0)
    abs_tol: float = Field(default_factory=lambda: Config.ABS_TOL, gt=0)
    max_step: float = Field(math.inf, gt=0)
    initial_step: Optional[float] = Field(None, gt=0)
    # RK45 is the Dormand-Prince 5(4) pair; DOP853 trades memory for fewer steps
    method: Literal["RK45", "DOP853"] = Field(default_factory=lambda: Config.INTEGRATOR_METHOD)

    def with_tolerance(self, tol: float) -> "IntegratorConfig":
        return self.model_copy(update={"rel_tol": tol, "abs_tol": tol})


# rhs -> chart label, used to rebuild typed states from raw vectors
CHARTS = {
    amplitude_field: "amplitude",
    angle_field: "angle",
}


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    values: np.ndarray      # (n, dim)
    controls: np.ndarray    # (n, 2) columns omega, delta
    chart: str = "generic"
    steps: int = 0

    def __len__(self) -> int:
        return len(self.times)

    @property
    def states(self) -> list:
        if self.chart == "amplitude":
            return [AmplitudeState.from_vector(v) for v in self.values]
        if self.chart == "angle":
            return [AngleState.from_vector(v) for v in self.values]
        return list(self.values)

    @property
    def final_state(self):
        return self.states[-1]

    def control_samples(self) -> list:
        return [ControlSample(float(o), float(d)) for o, d in self.controls]

    def populations(self) -> np.ndarray:
        if self.chart == "amplitude":
            return amplitude_array_to_bloch(self.values)[:, 2]
        if self.chart == "angle":
            return np.sin(0.5 * self.values[:, 0]) ** 2
        raise ValueError(f"populations undefined for chart '{self.chart}'")

    def alphas(self) -> np.ndarray:
        if self.chart == "angle":
            return self.values[:, 1]
        if self.chart == "amplitude":
            b1 = self.values[:, 0] + 1j * self.values[:, 1]
            b2 = self.values[:, 2] + 1j * self.values[:, 3]
            return np.angle(b1 * b1 * np.conj(b2))
        raise ValueError(f"alpha undefined for chart '{self.chart}'")

    def to_frame(self) -> pd.DataFrame:
        """Tabular view in the simulate export column order"""
        if self.chart != "amplitude":
            raise ValueError("only amplitude trajectories are exported")
        bloch = amplitude_array_to_bloch(self.values)
        return pd.DataFrame({
            "t": self.times,
            "re_b1": self.values[:, 0],
            "im_b1": self.values[:, 1],
            "re_b2": self.values[:, 2],
            "im_b2": self.values[:, 3],
            "p": bloch[:, 2],
            "pi_x": bloch[:, 0],
            "pi_y": bloch[:, 1],
            "omega": self.controls[:, 0],
            "delta": self.controls[:, 1],
        })


def integrate(rhs: VectorField, initial, pulse: Callable[[float], ControlSample],
              t_span: Tuple[float, float], cfg: Optional[IntegratorConfig] = None,
              sample_times: Optional[Sequence[float]] = None,
              params: SystemParams = DEFAULT_PARAMS) -> Trajectory:
    """Integrate `rhs(y, omega, delta, lambda_a, lambda_s)` under a pulse.

    With `sample_times` the trajectory is read from the solver's dense output
    at those instants; otherwise the accepted steps are returned. Errors from
    the vector field (chart singularities) propagate unchanged.
    """
    cfg = cfg or IntegratorConfig()
    t_i, t_f = float(t_span[0]), float(t_span[1])
    if not t_i < t_f:
        raise ValueError(f"t_span must be increasing, got ({t_i}, {t_f})")

    y0 = initial.to_vector() if hasattr(initial, "to_vector") else np.atleast_1d(np.asarray(initial, dtype=float))
    lambda_a, lambda_s = params.lambda_a, params.lambda_s

    def fun(t, y):
        ctrl = pulse(t)
        return rhs(y, ctrl[0], ctrl[1], lambda_a, lambda_s)

    dense = sample_times is not None
    sol = solve_ivp(
        fun,
        (t_i, t_f),
        y0,
        method=cfg.method,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        first_step=cfg.initial_step,
        dense_output=dense,
    )
    if sol.status == -1:
        raise StepSizeUnderflowError(float(sol.t[-1]), sol.message)

    if dense:
        times = np.asarray(sample_times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("sample_times must be a non-empty 1-D sequence")
        if np.any(np.diff(times) <= 0):
            raise ValueError("sample_times must be strictly increasing")
        if times[0] < t_i or times[-1] > t_f:
            raise ValueError("sample_times must lie inside t_span")
        values = sol.sol(times).T
    else:
        times, values = sol.t, sol.y.T

    controls = np.array([tuple(pulse(t)) for t in times], dtype=float).reshape(len(times), 2)
    logger.debug(f"integrated {CHARTS.get(rhs, 'generic')} chart over [{t_i}, {t_f}] in {len(sol.t) - 1} steps")
    return Trajectory(times=times, values=values, controls=controls,
                      chart=CHARTS.get(rhs, "generic"), steps=len(sol.t) - 1)


def closed_form_population(area_integral, theta0: float = 0.0):
    """p = tanh^2 of the drive integral int (Omega/2) sin(alpha) dt.

    `theta0` shifts the integration constant for a start away from b1 = 1.
    """
    offset = math.atanh(math.sin(0.5 * theta0)) if theta0 else 0.0
    return np.tanh(np.asarray(area_integral) + offset) ** 2


def drive_integral(trajectory: Trajectory) -> float:
    """int (Omega/2) sin(alpha) dt over the trajectory samples (Simpson's rule)"""
    integrand = 0.5 * trajectory.controls[:, 0] * np.sin(trajectory.alphas())
    return float(simpson(integrand, x=trajectory.times))
