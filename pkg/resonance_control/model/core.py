"""State charts and equations of motion of the driven (1:2) resonance.

Three equivalent charts describe a state: complex amplitudes (b1, b2) with
|b1|^2 + 2|b2|^2 = 1, the angles (theta, alpha, gamma), and the generalized
Bloch coordinates (pi_x, pi_y, p) living on pi_x^2 + pi_y^2 = 8 (1-p)^2 p.
"""

import logging
import math
from typing import NamedTuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from resonance_control.errors import ChartSingularityError

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
SINGULAR_TOL = 1e-12


class SystemParams(BaseModel):
    """Kerr coefficients (angular frequencies, units of 1/T)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda_a: float = Field(0.0, allow_inf_nan=False)
    lambda_s: float = Field(0.0, allow_inf_nan=False)


DEFAULT_PARAMS = SystemParams()


class ControlSample(NamedTuple):
    omega: float
    delta: float


class AmplitudeState(NamedTuple):
    b1: complex
    b2: complex

    @classmethod
    def ground(cls) -> "AmplitudeState":
        return cls(1.0 + 0.0j, 0.0j)

    @classmethod
    def from_vector(cls, y) -> "AmplitudeState":
        return cls(complex(y[0], y[1]), complex(y[2], y[3]))

    def to_vector(self) -> np.ndarray:
        return np.array([self.b1.real, self.b1.imag, self.b2.real, self.b2.imag])

    @property
    def norm(self) -> float:
        return abs(self.b1) ** 2 + 2.0 * abs(self.b2) ** 2


class AngleState(NamedTuple):
    theta: float
    alpha: float
    gamma: float

    @classmethod
    def from_vector(cls, y) -> "AngleState":
        return cls(float(y[0]), float(y[1]), float(y[2]))

    def to_vector(self) -> np.ndarray:
        return np.array([self.theta, self.alpha, self.gamma])


class BlochVector(NamedTuple):
    pi_x: float
    pi_y: float
    p: float

    @property
    def sphere_residual(self) -> float:
        return self.pi_x ** 2 + self.pi_y ** 2 - 8.0 * (1.0 - self.p) ** 2 * self.p


State = Union[AmplitudeState, AngleState]


def amplitude_field(y, omega: float, delta: float, lambda_a: float = 0.0,
                    lambda_s: float = 0.0) -> np.ndarray:
    """Real/imaginary split of the amplitude equations.

    y = (Re b1, Im b1, Re b2, Im b2). Kept free of complex arithmetic since it
    is the integrator's hot loop.
    """
    x1, y1, x2, y2 = y
    kappa = (delta - lambda_a + 2.0 * lambda_s * (x2 * x2 + y2 * y2)) / 3.0
    g1 = omega / SQRT2
    g2 = 0.5 * g1

    # conj(b1) * b2 and b1 ** 2
    cr = x1 * x2 + y1 * y2
    ci = x1 * y2 - y1 * x2
    sr = x1 * x1 - y1 * y1
    si = 2.0 * x1 * y1

    return np.array([
        -kappa * y1 + g1 * ci,
        kappa * x1 - g1 * cr,
        kappa * y2 + g2 * si,
        -kappa * x2 - g2 * sr,
    ])


def angle_field(y, omega: float, delta: float, lambda_a: float = 0.0,
                lambda_s: float = 0.0) -> np.ndarray:
    """Angle equations; y = (theta, alpha, gamma), alpha and gamma unwrapped."""
    theta, alpha, _ = y
    s = math.sin(0.5 * theta)
    if abs(s) < SINGULAR_TOL:
        raise ChartSingularityError(theta)
    c = math.cos(0.5 * theta)
    detuning = delta - lambda_a + lambda_s * s * s
    cos_a = math.cos(alpha)

    return np.array([
        omega * math.sin(alpha) * c,
        0.5 * omega * cos_a * (1.0 - 3.0 * s * s) / s + detuning,
        0.5 * omega * cos_a * s - detuning / 3.0,
    ])


def amplitude_rhs(state: AmplitudeState, ctrl: ControlSample,
                  params: SystemParams = DEFAULT_PARAMS) -> AmplitudeState:
    """Time derivative (db1/dt, db2/dt) of an amplitude state"""
    d = amplitude_field(state.to_vector(), ctrl.omega, ctrl.delta, params.lambda_a, params.lambda_s)
    return AmplitudeState.from_vector(d)


def angle_rhs(state: AngleState, ctrl: ControlSample,
              params: SystemParams = DEFAULT_PARAMS) -> AngleState:
    """Time derivative (dtheta/dt, dalpha/dt, dgamma/dt) of an angle state"""
    d = angle_field(state.to_vector(), ctrl.omega, ctrl.delta, params.lambda_a, params.lambda_s)
    return AngleState.from_vector(d)


def angles_to_amplitudes(state: AngleState) -> AmplitudeState:
    theta, alpha, gamma = state
    b1 = math.cos(0.5 * theta) * complex(math.cos(gamma), -math.sin(gamma))
    phase = alpha + 2.0 * gamma
    b2 = math.sin(0.5 * theta) / SQRT2 * complex(math.cos(phase), -math.sin(phase))
    return AmplitudeState(b1, b2)


def amplitudes_to_angles(state: AmplitudeState) -> AngleState:
    """Inverse chart map; alpha and gamma come back wrapped to (-pi, pi]."""
    b1, b2 = state
    theta = 2.0 * math.atan2(SQRT2 * abs(b2), abs(b1))
    arg1 = math.atan2(b1.imag, b1.real)
    arg2 = math.atan2(b2.imag, b2.real)
    alpha = math.remainder(2.0 * arg1 - arg2, 2.0 * math.pi)
    return AngleState(theta, alpha, -arg1)


def population(state: State) -> float:
    """p = 2|b2|^2, normalized so that 1 - p = |b1|^2 / N stays exact near the target"""
    if isinstance(state, AngleState):
        return math.sin(0.5 * state.theta) ** 2
    b1_sq = abs(state.b1) ** 2
    b2_sq = 2.0 * abs(state.b2) ** 2
    return b2_sq / (b1_sq + b2_sq)


def bloch_from_population(p, alpha):
    """(pi_x, pi_y) on the generalized sphere for arrays or scalars of (p, alpha)"""
    p = np.asarray(p, dtype=float)
    radius = 2.0 * SQRT2 * (1.0 - p) * np.sqrt(np.clip(p, 0.0, None))
    return radius * np.cos(alpha), radius * np.sin(alpha)


def to_bloch(state: State) -> BlochVector:
    if isinstance(state, AngleState):
        p = population(state)
        pi_x, pi_y = bloch_from_population(p, state.alpha)
        return BlochVector(float(pi_x), float(pi_y), p)

    p = population(state)
    # b1^2 conj(b2) carries the phase e^{i alpha}
    coherence = state.b1 * state.b1 * state.b2.conjugate()
    magnitude = abs(coherence)
    unit = coherence / magnitude if magnitude > 0.0 else 1.0 + 0.0j
    radius = 2.0 * SQRT2 * (1.0 - p) * math.sqrt(p)
    return BlochVector(radius * unit.real, radius * unit.imag, p)


def amplitude_array_to_bloch(values: np.ndarray) -> np.ndarray:
    """Vectorized to_bloch for an (n, 4) array of amplitude vectors; returns (n, 3)"""
    b1 = values[:, 0] + 1j * values[:, 1]
    b2 = values[:, 2] + 1j * values[:, 3]
    b1_sq = np.abs(b1) ** 2
    b2_sq = 2.0 * np.abs(b2) ** 2
    p = b2_sq / (b1_sq + b2_sq)
    alpha = np.angle(b1 * b1 * np.conj(b2))
    pi_x, pi_y = bloch_from_population(p, alpha)
    return np.column_stack([pi_x, pi_y, p])
