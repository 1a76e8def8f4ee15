"""Simplex search over the phase-expansion coefficients C_1..C_n.

The objective is the zone-averaged final population of the robust pulse
built from C, scored on a coarse grid; invalid designs score 0.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import minimize

from resonance_control.analysis.robustness import scan_2d
from resonance_control.config import Config
from resonance_control.control.pulses import pulse_area
from resonance_control.control.robust import RobustDesign, RobustPulse
from resonance_control.errors import ResonanceError
from resonance_control.model.integrator import IntegratorConfig

logger = logging.getLogger(__name__)


def _coarse_integrator() -> IntegratorConfig:
    return IntegratorConfig(rel_tol=Config.OPTIMIZER_TOL, abs_tol=Config.OPTIMIZER_TOL)


class OptimizeSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(1, ge=1)
    delta0_range: Tuple[float, float] = (-0.6, 0.6)
    beta_range: Tuple[float, float] = (0.0, 0.0)
    resolution: int = Field(default_factory=lambda: Config.OBJECTIVE_RESOLUTION, ge=1)
    beta_resolution: int = Field(5, ge=1)
    final_resolution: int = Field(61, ge=1)
    final_beta_resolution: int = Field(11, ge=1)
    epsilon: float = Field(0.03, gt=0, lt=1)
    alpha_margin: float = Field(default_factory=lambda: Config.ALPHA_MARGIN, gt=0, lt=math.pi / 2)
    T: float = Field(1.0, gt=0)
    budget: int = Field(500, gt=0)
    seed: int = 0
    area_penalty: float = Field(0.0, ge=0)
    area_cap: float = Field(math.inf, gt=0)
    simplex_step: float = Field(0.5, gt=0)
    restart_scale: float = Field(0.1, gt=0)
    restart_diameter: float = Field(1e-4, gt=0)
    max_restarts: int = Field(5, ge=0)
    integrator: IntegratorConfig = Field(default_factory=_coarse_integrator)
    jobs: int = Field(default_factory=lambda: Config.JOBS, ge=1)

    @model_validator(mode="after")
    def _check_ranges(self):
        for name in ("delta0_range", "beta_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} must be ordered (low, high)")
        return self

    def grids(self, fine: bool = False) -> Tuple[np.ndarray, np.ndarray]:
        n_delta = self.final_resolution if fine else self.resolution
        n_beta = self.final_beta_resolution if fine else self.beta_resolution
        return _grid(self.delta0_range, n_delta), _grid(self.beta_range, n_beta)


def _grid(bounds: Tuple[float, float], num: int) -> np.ndarray:
    lo, hi = bounds
    if lo == hi or num == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, num)


def _score(coefficients: Sequence[float], spec: OptimizeSpec, fine: bool = False) -> Tuple[float, bool]:
    design = RobustDesign(epsilon=spec.epsilon, coefficients=tuple(float(c) for c in coefficients),
                          T=spec.T, alpha_margin=spec.alpha_margin)
    pulse = RobustPulse(design=design)
    if not pulse.solution.valid:
        return 0.0, False

    deltas, betas = spec.grids(fine)
    cfg = IntegratorConfig() if fine else spec.integrator
    try:
        score = scan_2d(pulse, deltas, betas, cfg=cfg, jobs=spec.jobs, tail_check=fine).mean
        if spec.area_penalty > 0.0 and math.isfinite(spec.area_cap):
            score -= spec.area_penalty * max(0.0, pulse_area(pulse) - spec.area_cap)
    except ResonanceError as exc:
        logger.debug(f"design {design.coefficients} scored 0: {exc}")
        return 0.0, False
    return float(score), True


def objective(coefficients: Sequence[float], spec: OptimizeSpec, fine: bool = False) -> float:
    """Zone-averaged fidelity minus area_penalty * max(0, area - area_cap); 0 for invalid designs"""
    return _score(coefficients, spec, fine)[0]


class _BudgetExhausted(Exception):
    pass


@dataclass
class OptimizeResult:
    coefficients: Tuple[float, ...]
    objective: float
    fine_objective: float
    evaluations: int
    restarts: int
    trace: List[Tuple[int, Tuple[float, ...], float, bool]] = field(default_factory=list)

    @property
    def best_trace(self) -> np.ndarray:
        """Best objective after each evaluation (non-decreasing)"""
        return np.maximum.accumulate(np.array([row[2] for row in self.trace]))

    def to_frame(self) -> pd.DataFrame:
        n = len(self.coefficients)
        rows = [{"eval_index": index, **{f"c{j + 1}": c[j] for j in range(n)}, "objective": value}
                for index, c, value, _ in self.trace]
        return pd.DataFrame(rows, columns=["eval_index", *[f"c{j + 1}" for j in range(n)], "objective"])

    def summary(self) -> dict:
        return {
            "coefficients": list(self.coefficients),
            "objective": self.objective,
            "fine_objective": self.fine_objective,
            "evaluations": self.evaluations,
            "restarts": self.restarts,
        }


def optimize(spec: OptimizeSpec, initial: Optional[Sequence[float]] = None) -> OptimizeResult:
    """Nelder-Mead on -objective with seeded restarts once the simplex collapses.

    Stops when the evaluation budget is spent or after max_restarts; running
    out of budget is a normal end. The best design is re-scored on the fine grid.
    """
    x0 = np.zeros(spec.n) if initial is None else np.asarray(initial, dtype=float)
    if x0.shape != (spec.n,):
        raise ValueError(f"initial point must have {spec.n} coefficients, got shape {x0.shape}")

    rng = np.random.default_rng(spec.seed)
    trace: List[Tuple[int, Tuple[float, ...], float, bool]] = []
    best = {"x": tuple(x0), "value": -math.inf, "valid": False}

    def scored(x) -> float:
        if len(trace) >= spec.budget:
            raise _BudgetExhausted()
        coefficients = tuple(float(c) for c in x)
        value, valid = _score(coefficients, spec)
        trace.append((len(trace), coefficients, value, valid))
        # valid designs always beat invalid ones
        if (valid, value) > (best["valid"], best["value"]):
            best.update(x=coefficients, value=value, valid=valid)
        return -value

    restarts = 0
    start = x0
    while True:
        simplex = np.vstack([start, start + spec.simplex_step * np.eye(spec.n)])
        try:
            res = minimize(scored, start, method="Nelder-Mead",
                           options={"initial_simplex": simplex, "maxfev": spec.budget,
                                    "xatol": 0.5 * spec.restart_diameter, "fatol": Config.OPTIMIZER_TOL})
        except _BudgetExhausted:
            logger.info(f"evaluation budget {spec.budget} spent")
            break
        final = res.final_simplex[0]
        diameter = max(np.linalg.norm(a - b) for a in final for b in final)
        logger.info(f"simplex converged at {tuple(np.round(res.x, 6))} objective {-res.fun:.6f} (diameter {diameter:.2e})")
        if diameter >= spec.restart_diameter or restarts >= spec.max_restarts or len(trace) >= spec.budget:
            break
        restarts += 1
        start = np.asarray(best["x"]) + rng.normal(scale=spec.restart_scale, size=spec.n)
        logger.info(f"restart {restarts} from {tuple(np.round(start, 6))}")

    fine_value = objective(best["x"], spec, fine=True)
    logger.info(f"best coefficients {best['x']} objective {best['value']:.6f} (fine grid {fine_value:.6f})")
    return OptimizeResult(coefficients=best["x"], objective=best["value"], fine_objective=fine_value,
                          evaluations=len(trace), restarts=restarts, trace=trace)
