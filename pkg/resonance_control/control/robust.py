"""Inverse-engineered robust pulses.

The population angle follows an erf profile, the phase gamma is expanded as
gamma(theta) = theta + sum_j C_j sin(j theta), and alpha(theta) solves

    d alpha / d theta = 1 / (tan(alpha) sin(theta)) - 3 d gamma / d theta

from the singular start alpha(0) = +pi/2. Omega and Delta then follow from
the angle equations.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.special import erfc

from resonance_control.config import Config
from resonance_control.control.pulses import Pulse
from resonance_control.errors import DesignInvalidError
from resonance_control.model.core import DEFAULT_PARAMS, AngleState, ControlSample, SystemParams

logger = logging.getLogger(__name__)

TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


class RobustDesign(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    epsilon: float = Field(0.03, gt=0, lt=1)
    coefficients: Tuple[float, ...] = Field((-0.5,), min_length=1)
    T: float = Field(1.0, gt=0)
    # sign of alpha(0); only "plus" keeps Omega positive while theta grows
    branch: Literal["plus", "minus"] = "plus"
    alpha_margin: float = Field(default_factory=lambda: Config.ALPHA_MARGIN, gt=0, lt=math.pi / 2)

    @property
    def theta_max(self) -> float:
        return math.pi * (1.0 - self.epsilon)

    @property
    def slope_at_origin(self) -> float:
        """d gamma / d theta at theta = 0, i.e. 1 + sum_j j C_j"""
        return 1.0 + sum(j * c for j, c in enumerate(self.coefficients, start=1))

    @property
    def target_population(self) -> float:
        """Designed final population cos^2(pi epsilon / 2)"""
        return math.cos(0.5 * math.pi * self.epsilon) ** 2


def theta_profile(design: RobustDesign, t: float) -> Tuple[float, float]:
    """theta(t) = (pi/2)(1-eps)[1 + erf(t/T)] and its time derivative"""
    amplitude = 0.5 * design.theta_max
    x = t / design.T
    # 1 + erf(x) == erfc(-x), accurate in the far past
    theta = amplitude * float(erfc(-x))
    theta_dot = amplitude * TWO_OVER_SQRT_PI * math.exp(-x * x) / design.T
    return theta, theta_dot


def gamma_expansion(design: RobustDesign, theta):
    """gamma(theta) and d gamma / d theta; accepts scalars or arrays"""
    coefficients = np.asarray(design.coefficients, dtype=float)
    orders = np.arange(1, coefficients.size + 1)
    theta_arr = np.asarray(theta, dtype=float)
    phases = np.multiply.outer(theta_arr, orders)
    gamma = theta_arr + np.sin(phases) @ coefficients
    slope = 1.0 + np.cos(phases) @ (orders * coefficients)
    if theta_arr.ndim == 0:
        return float(gamma), float(slope)
    return gamma, slope


def _alpha_slope(design: RobustDesign, theta: float, alpha: float) -> float:
    return math.cos(alpha) / (math.sin(alpha) * math.sin(theta)) - 3.0 * gamma_expansion(design, theta)[1]


@dataclass(frozen=True)
class DesignSolution:
    design: RobustDesign
    theta_grid: np.ndarray
    alpha_of_theta: np.ndarray
    gamma_of_theta: np.ndarray
    valid: bool
    diagnostic: str = ""
    exit_theta: Optional[float] = None
    interpolant: Optional[CubicHermiteSpline] = field(default=None, repr=False)

    def alpha(self, theta):
        theta = np.clip(theta, 0.0, self.theta_grid[-1])
        value = self.interpolant(theta)
        return float(value) if np.ndim(value) == 0 else value

    def require_valid(self) -> None:
        if not self.valid:
            raise DesignInvalidError(self.diagnostic, theta=self.exit_theta)


def solve_alpha(design: RobustDesign, theta_min: float = Config.THETA_MIN,
                rel_tol: float = Config.DESIGN_REL_TOL,
                abs_tol: float = Config.DESIGN_ABS_TOL) -> DesignSolution:
    """Integrate alpha(theta) from the regular series start out to pi(1 - eps).

    Near theta = 0 with alpha = +-pi/2 + d the leading balance is
    d' + d / theta = -3 gamma'(0), whose regular solution is
    d = -(3/2) gamma'(0) theta; integration starts there at theta_min.
    """
    sign = 1.0 if design.branch == "plus" else -1.0
    g0 = design.slope_at_origin
    alpha0 = sign * 0.5 * math.pi
    alpha_start = alpha0 - 1.5 * g0 * theta_min
    margin = design.alpha_margin
    lower, upper = margin, math.pi - margin

    if not lower < alpha_start < upper:
        message = f"alpha={alpha_start:.6f} outside ({lower:g}, pi-{margin:g}) at theta={theta_min:.3e}"
        logger.info(f"design {design.coefficients} invalid: {message}")
        return DesignSolution(design, np.array([0.0]), np.array([alpha0]),
                              np.array([0.0]), valid=False, diagnostic=message, exit_theta=theta_min)

    def rhs(theta, y):
        return [_alpha_slope(design, theta, y[0])]

    def below(theta, y):
        return y[0] - lower

    def above(theta, y):
        return upper - y[0]

    below.terminal = True
    above.terminal = True

    sol = solve_ivp(rhs, (theta_min, design.theta_max), [alpha_start], method="DOP853",
                    rtol=rel_tol, atol=abs_tol, events=(below, above),
                    max_step=design.theta_max * Config.DESIGN_MAX_STEP_FRACTION)

    theta_grid = np.concatenate([[0.0], sol.t])
    alpha_grid = np.concatenate([[alpha0], sol.y[0]])
    gamma_grid = gamma_expansion(design, theta_grid)[0]

    if sol.status == 1:
        exit_theta = float(sol.t[-1])
        message = f"alpha left ({lower:g}, pi-{margin:g}) at theta={exit_theta:.6f}"
        logger.info(f"design {design.coefficients} invalid: {message}")
        return DesignSolution(design, theta_grid, alpha_grid, gamma_grid,
                              valid=False, diagnostic=message, exit_theta=exit_theta)
    if sol.status != 0:
        raise DesignInvalidError(f"alpha(theta) integration failed: {sol.message}", theta=float(sol.t[-1]))

    slopes = np.empty_like(theta_grid)
    slopes[0] = -1.5 * g0
    slopes[1:] = [_alpha_slope(design, th, al) for th, al in zip(theta_grid[1:], alpha_grid[1:])]
    interpolant = CubicHermiteSpline(theta_grid, alpha_grid, slopes)

    logger.debug(f"solved alpha(theta) for {design.coefficients} on {len(theta_grid)} nodes")
    return DesignSolution(design, theta_grid, alpha_grid, gamma_grid, valid=True,
                          interpolant=interpolant)


def prescribed_angles(design: RobustDesign, solution: DesignSolution, t: float) -> AngleState:
    solution.require_valid()
    theta, _ = theta_profile(design, t)
    return AngleState(theta, solution.alpha(theta), gamma_expansion(design, theta)[0])


def shape_fields(design: RobustDesign, solution: DesignSolution, t: float,
                 params: SystemParams = DEFAULT_PARAMS) -> ControlSample:
    """Fields realizing the prescribed (theta, alpha, gamma) trajectory.

    Omega = theta' / (sin(alpha) cos(theta/2)) and
    Delta = 3[(Omega/2) cos(alpha) sin(theta/2) - gamma'] + Lambda_a - Lambda_s sin^2(theta/2).
    """
    solution.require_valid()
    theta, theta_dot = theta_profile(design, t)
    alpha = solution.alpha(theta)
    slope = gamma_expansion(design, theta)[1]
    s = math.sin(0.5 * theta)
    omega = theta_dot / (math.sin(alpha) * math.cos(0.5 * theta))
    delta = 3.0 * (0.5 * omega * math.cos(alpha) * s - slope * theta_dot) + params.lambda_a - params.lambda_s * s * s
    return ControlSample(omega, delta)


def uncorrected_detuning(design: RobustDesign, solution: DesignSolution, t: float,
                         params: SystemParams = DEFAULT_PARAMS) -> float:
    """Detuning with the first term lacking its theta' factor.

    Kept for comparison only: (3/2) cot(alpha) tan(theta/2) - 3 gamma' + Lambda_a - Lambda_s sin^2(theta/2).
    """
    solution.require_valid()
    theta, theta_dot = theta_profile(design, t)
    alpha = solution.alpha(theta)
    slope = gamma_expansion(design, theta)[1]
    s = math.sin(0.5 * theta)
    return (1.5 / math.tan(alpha) * math.tan(0.5 * theta) - 3.0 * slope * theta_dot
            + params.lambda_a - params.lambda_s * s * s)


def detuning_discrepancy(design: RobustDesign, solution: DesignSolution, times,
                         params: SystemParams = DEFAULT_PARAMS) -> np.ndarray:
    """Uncorrected minus consistent detuning at each time"""
    return np.array([
        uncorrected_detuning(design, solution, t, params) - shape_fields(design, solution, t, params).delta
        for t in np.atleast_1d(times)
    ])


class RobustPulse(Pulse):
    kind: Literal["robust"] = "robust"
    design: RobustDesign = RobustDesign()
    params: SystemParams = DEFAULT_PARAMS

    _solution: Optional[DesignSolution] = PrivateAttr(default=None)

    def model_post_init(self, __context) -> None:
        self._solution = solve_alpha(self.design)

    @property
    def solution(self) -> DesignSolution:
        return self._solution

    @property
    def T(self) -> float:
        return self.design.T

    def bare(self, t: float) -> ControlSample:
        return shape_fields(self.design, self._solution, t, self.params)

    def default_span(self) -> Tuple[float, float]:
        half = Config.ROBUST_SPAN * self.design.T
        return (-half, half)
