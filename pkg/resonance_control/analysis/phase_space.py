"""Classical phase-space analysis of the mean-field dynamics.

With the canonical pair (I = p/2, alpha) the motion derives from

    h = -Delta/3 + Delta p/2 + (Omega/2)(1-p) sqrt(p) cos(alpha)

(plus -Lambda_a p/2 + Lambda_s p^2/4 with Kerr terms). The target p = 1 is a
chart pole whose nature flips at |Delta/Omega| = 1.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from resonance_control.config import Config
from resonance_control.control.pulses import SquarePulse
from resonance_control.errors import NoSeparatrixError
from resonance_control.model.core import DEFAULT_PARAMS, ControlSample, SystemParams, bloch_from_population
from resonance_control.model.integrator import IntegratorConfig, integrate

logger = logging.getLogger(__name__)


class PointKind(str, Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    DEGENERATE = "degenerate"


class FixedPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float
    alpha: Optional[float] = None   # None at the poles, where alpha is undefined
    kind: PointKind
    is_pole: bool = False


def hamiltonian(p, alpha, ctrl: ControlSample, params: SystemParams = DEFAULT_PARAMS):
    omega, delta = ctrl
    p = np.asarray(p, dtype=float)
    h = (-delta / 3.0 + 0.5 * delta * p + 0.5 * omega * (1.0 - p) * np.sqrt(p) * np.cos(alpha)
         - 0.5 * params.lambda_a * p + 0.25 * params.lambda_s * p * p)
    return float(h) if h.ndim == 0 else h


def phase_flow(p: float, alpha: float, ctrl: ControlSample,
               params: SystemParams = DEFAULT_PARAMS) -> Tuple[float, float]:
    """(dp/dt, dalpha/dt) from Hamilton's equations; p must lie in (0, 1]"""
    omega, delta = ctrl
    root = math.sqrt(p)
    p_dot = omega * (1.0 - p) * root * math.sin(alpha)
    alpha_dot = (0.5 * omega * math.cos(alpha) * (1.0 - 3.0 * p) / root
                 + delta - params.lambda_a + params.lambda_s * p)
    return p_dot, alpha_dot


def hamilton_field(y, omega: float, delta: float, lambda_a: float = 0.0,
                   lambda_s: float = 0.0) -> np.ndarray:
    """phase_flow in the vector-field signature used by the integrator"""
    params = SystemParams(lambda_a=lambda_a, lambda_s=lambda_s) if (lambda_a or lambda_s) else DEFAULT_PARAMS
    return np.array(phase_flow(y[0], y[1], ControlSample(omega, delta), params))


def jacobian(p: float, alpha: float, ctrl: ControlSample,
             params: SystemParams = DEFAULT_PARAMS) -> np.ndarray:
    """Linearization d(p_dot, alpha_dot)/d(p, alpha)"""
    omega = ctrl.omega
    root = math.sqrt(p)
    sin_a, cos_a = math.sin(alpha), math.cos(alpha)
    return np.array([
        [omega * sin_a * (1.0 - 3.0 * p) / (2.0 * root), omega * (1.0 - p) * root * cos_a],
        [-0.25 * omega * cos_a * (1.0 + 3.0 * p) / (p * root) + params.lambda_s,
         -0.5 * omega * sin_a * (1.0 - 3.0 * p) / root],
    ])


def _classify_interior(p: float, alpha: float, ctrl: ControlSample) -> PointKind:
    eig = np.linalg.eigvals(jacobian(p, alpha, ctrl))
    scale = max(1.0, float(np.max(np.abs(eig))))
    if np.max(np.abs(eig.real)) < Config.EIGEN_REAL_TOL * scale:
        return PointKind.ELLIPTIC
    return PointKind.HYPERBOLIC


def classify_target(ctrl: ControlSample) -> PointKind:
    """Nature of the p = 1 pole: hyperbolic below |Delta/Omega| = 1, elliptic above"""
    if ctrl.omega <= 0.0:
        raise ValueError("classify_target needs omega > 0; with omega = 0 both poles are elliptic")
    ratio = abs(ctrl.delta) / ctrl.omega
    if abs(ratio - 1.0) <= Config.DEGENERATE_TOL:
        return PointKind.DEGENERATE
    return PointKind.HYPERBOLIC if ratio < 1.0 else PointKind.ELLIPTIC


def _interior_root(ctrl: ControlSample, sign: float) -> float:
    """Positive root u = sqrt(p) of 3 Omega u^2 - 2 sign Delta u - Omega = 0"""
    omega, delta = ctrl
    signed = sign * delta
    radical = math.sqrt(delta * delta + 3.0 * omega * omega)
    if signed >= 0.0:
        return (signed + radical) / (3.0 * omega)
    return omega / (radical - signed)


def fixed_points(ctrl: ControlSample) -> List[FixedPoint]:
    """Instantaneous fixed points at frozen controls.

    Interior points lie on alpha = 0 or pi; p = 1 is always appended. The
    degenerate target at |Delta/Omega| = 1 is listed as elliptic.
    """
    if ctrl.omega < 0.0:
        raise ValueError(f"omega must be non-negative, got {ctrl.omega}")
    if ctrl.omega == 0.0:
        return [
            FixedPoint(p=0.0, kind=PointKind.ELLIPTIC, is_pole=True),
            FixedPoint(p=1.0, kind=PointKind.ELLIPTIC, is_pole=True),
        ]

    points = []
    for alpha, sign in ((0.0, 1.0), (math.pi, -1.0)):
        u = _interior_root(ctrl, sign)
        if 0.0 < u < 1.0:
            p = u * u
            points.append(FixedPoint(p=p, alpha=alpha, kind=_classify_interior(p, alpha, ctrl)))

    target = classify_target(ctrl)
    if target is PointKind.DEGENERATE:
        target = PointKind.ELLIPTIC
    points.append(FixedPoint(p=1.0, kind=target, is_pole=True))
    return points


@dataclass(frozen=True)
class SeparatrixCurve:
    """Ordered (p, alpha) samples of sqrt(p) cos(alpha) = Delta/Omega, alpha < 0 branch first"""

    control: ControlSample
    p: np.ndarray
    alpha: np.ndarray
    energy: float

    def __len__(self) -> int:
        return len(self.p)

    @property
    def bloch(self) -> np.ndarray:
        pi_x, pi_y = bloch_from_population(self.p, self.alpha)
        return np.column_stack([pi_x, pi_y, self.p])

    @property
    def arc_length(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.bloch, axis=0), axis=1)))


def _separatrix_ratio(ctrl: ControlSample) -> float:
    if ctrl.omega <= 0.0:
        raise NoSeparatrixError("no separatrix without a drive (omega = 0)")
    ratio = ctrl.delta / ctrl.omega
    if abs(ratio) >= 1.0:
        raise NoSeparatrixError(f"no separatrix for |Delta/Omega| = {abs(ratio):.6g} >= 1")
    return ratio


def _separatrix_points(ratio: float, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # s in [-1, 1]; s = 0 is the vertex at p = ratio^2
    p = ratio * ratio + (1.0 - ratio * ratio) * s * s
    root = np.sqrt(p)
    cosine = np.divide(ratio, root, out=np.ones_like(root), where=root > 0.0)
    alpha = np.sign(s) * np.arccos(np.clip(cosine, -1.0, 1.0))
    return p, alpha


def separatrix(ctrl: ControlSample, n_samples: int = Config.SEPARATRIX_SAMPLES) -> SeparatrixCurve:
    """Separatrix through the hyperbolic target, resampled uniformly in arc length on the sphere"""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    ratio = _separatrix_ratio(ctrl)

    fine = np.linspace(-1.0, 1.0, 8 * n_samples + 1)
    p, alpha = _separatrix_points(ratio, fine)
    pi_x, pi_y = bloch_from_population(p, alpha)
    steps = np.linalg.norm(np.diff(np.column_stack([pi_x, pi_y, p]), axis=0), axis=1)
    length = np.concatenate([[0.0], np.cumsum(steps)])

    if length[-1] > 0.0:
        s = np.interp(np.linspace(0.0, length[-1], n_samples), length, fine)
    else:
        s = np.linspace(-1.0, 1.0, n_samples)
    p, alpha = _separatrix_points(ratio, s)
    return SeparatrixCurve(control=ctrl, p=p, alpha=alpha, energy=ctrl.delta / 6.0)


def separatrix_at_latitude(ctrl: ControlSample, p: float) -> Optional[Tuple[float, float]]:
    """(alpha_plus, alpha_minus) of the separatrix at population p, or None off its range"""
    ratio = _separatrix_ratio(ctrl)
    if not ratio * ratio <= p <= 1.0:
        return None
    alpha = math.acos(max(-1.0, min(1.0, ratio / math.sqrt(p)))) if p > 0.0 else 0.5 * math.pi
    return alpha, -alpha


@dataclass(frozen=True)
class Contour:
    energy: float
    p: np.ndarray
    alpha: np.ndarray

    @property
    def bloch(self) -> np.ndarray:
        pi_x, pi_y = bloch_from_population(self.p, self.alpha)
        return np.column_stack([pi_x, pi_y, self.p])


def level_set(ctrl: ControlSample, energy: float, n_samples: int = Config.SEPARATRIX_SAMPLES,
              params: SystemParams = DEFAULT_PARAMS) -> Contour:
    """Curve h(p, alpha) = energy, solved for cos(alpha) on a population grid"""
    if ctrl.omega <= 0.0:
        raise ValueError("level sets need omega > 0")
    omega, delta = ctrl
    p = np.linspace(0.0, 1.0, n_samples + 2)[1:-1]
    rest = (energy + delta / 3.0 - 0.5 * delta * p
            + 0.5 * params.lambda_a * p - 0.25 * params.lambda_s * p * p)
    cosine = rest / (0.5 * omega * (1.0 - p) * np.sqrt(p))
    inside = np.abs(cosine) <= 1.0
    p, alpha = p[inside], np.arccos(cosine[inside])
    return Contour(energy=energy,
                   p=np.concatenate([p, p[::-1]]),
                   alpha=np.concatenate([alpha, -alpha[::-1]]))


@dataclass(frozen=True)
class Portrait:
    control: ControlSample
    fixed_points: List[FixedPoint]
    separatrix: Optional[SeparatrixCurve] = None
    contours: List[Contour] = field(default_factory=list)

    @property
    def target_kind(self) -> PointKind:
        return self.fixed_points[-1].kind

    def to_frame(self) -> pd.DataFrame:
        """Rows (curve_id, p, alpha, pi_x, pi_y, kind); poles carry alpha = NaN"""
        frames = []
        for index, point in enumerate(self.fixed_points):
            alpha = point.alpha if point.alpha is not None else math.nan
            pi_x, pi_y = bloch_from_population(point.p, 0.0 if point.alpha is None else point.alpha)
            frames.append(pd.DataFrame({
                "curve_id": [f"fixed_point_{index}"], "p": [point.p], "alpha": [alpha],
                "pi_x": [float(pi_x)], "pi_y": [float(pi_y)],
                "kind": [point.kind.value + ("_pole" if point.is_pole else "")],
            }))
        curves = [("separatrix", self.separatrix)] if self.separatrix is not None else []
        curves += [(f"contour_{index}", contour) for index, contour in enumerate(self.contours)]
        for curve_id, curve in curves:
            bloch = curve.bloch
            frames.append(pd.DataFrame({
                "curve_id": curve_id, "p": curve.p, "alpha": curve.alpha,
                "pi_x": bloch[:, 0], "pi_y": bloch[:, 1],
                "kind": "separatrix" if curve_id == "separatrix" else "contour",
            }))
        return pd.concat(frames, ignore_index=True)


def portrait(ctrl: ControlSample, n_samples: int = Config.SEPARATRIX_SAMPLES,
             n_contours: int = 0, params: SystemParams = DEFAULT_PARAMS) -> Portrait:
    points = fixed_points(ctrl)
    curve = None
    if ctrl.omega > 0.0 and abs(ctrl.delta) < ctrl.omega:
        curve = separatrix(ctrl, n_samples)

    contours = []
    if n_contours > 0 and ctrl.omega > 0.0:
        grid_p, grid_a = np.meshgrid(np.linspace(0.0, 1.0, 101), np.linspace(-math.pi, math.pi, 101))
        energies = hamiltonian(grid_p, grid_a, ctrl, params)
        levels = np.linspace(energies.min(), energies.max(), n_contours + 2)[1:-1]
        contours = [level_set(ctrl, level, n_samples, params) for level in levels]

    logger.debug(f"portrait at {ctrl}: {len(points)} fixed points, separatrix={'yes' if curve else 'no'}")
    return Portrait(control=ctrl, fixed_points=points, separatrix=curve, contours=contours)


def fixed_point_track(pulse, times: Sequence[float], branch: str = "zero") -> Tuple[np.ndarray, np.ndarray]:
    """Instantaneous interior fixed point on the alpha = 0 ("zero") or pi branch along a pulse.

    Returns (p, alpha) arrays with NaN wherever that branch has no fixed point.
    """
    target = 0.0 if branch == "zero" else math.pi
    fp_p = np.full(len(times), math.nan)
    fp_alpha = np.full(len(times), math.nan)
    for i, t in enumerate(times):
        ctrl = pulse(t)
        if ctrl.omega <= 0.0:
            continue
        for point in fixed_points(ctrl):
            if not point.is_pole and point.alpha == target:
                fp_p[i], fp_alpha[i] = point.p, point.alpha
    return fp_p, fp_alpha


def perturbed_excursion(ctrl: ControlSample, point: FixedPoint, offset: float = 1e-4,
                        periods: float = 50.0, cfg: Optional[IntegratorConfig] = None) -> float:
    """Largest (p, alpha) distance from an interior fixed point reached by a nearby orbit.

    The run lasts `periods` characteristic times 2 pi / |lambda| of the
    linearization; elliptic points keep the excursion near `offset`.
    """
    if point.is_pole:
        raise ValueError("perturbed_excursion applies to interior fixed points only")
    eig = np.linalg.eigvals(jacobian(point.p, point.alpha, ctrl))
    rate = float(np.max(np.abs(eig)))
    duration = periods * 2.0 * math.pi / rate

    start = np.array([point.p + offset / math.sqrt(2.0), point.alpha + offset / math.sqrt(2.0)])
    frozen = SquarePulse(omega=ctrl.omega, delta=ctrl.delta, T=duration)
    try:
        traj = integrate(hamilton_field, start, frozen, (0.0, duration), cfg)
    except (ArithmeticError, ValueError) as exc:
        # an orbit reaching a pole has left the neighbourhood
        logger.debug(f"excursion from p={point.p:.6f} stopped: {exc}")
        return math.inf
    offsets = traj.values - np.array([point.p, point.alpha])
    return float(np.max(np.linalg.norm(offsets, axis=1)))
