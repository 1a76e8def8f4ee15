"""Systematic-error model and the robustness scan harness."""

import logging
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from resonance_control import __version__
from resonance_control.config import Config
from resonance_control.control.pulses import Perturbation, Pulse
from resonance_control.errors import EmptyZoneError, InvalidPerturbationError
from resonance_control.model.core import DEFAULT_PARAMS, AmplitudeState, SystemParams, amplitude_field, population
from resonance_control.model.integrator import IntegratorConfig, integrate

logger = logging.getLogger(__name__)

TAIL_TOL = 1e-6


def perturb(pulse: Pulse, pert: Perturbation) -> Pulse:
    """Copy of the pulse with Omega -> (1+beta) Omega and Delta -> Delta + delta0 on top of its own errors"""
    composed = pulse.perturbation.compose(pert)
    if 1.0 + pert.beta <= 0.0 or 1.0 + composed.beta <= 0.0:
        raise InvalidPerturbationError(f"amplitude factor 1 + beta must be positive (beta={pert.beta})")
    # model_copy keeps any solved design attached to the pulse
    return pulse.model_copy(update={"perturbation": composed})


def _clip(p: float) -> float:
    return min(1.0, max(0.0, p))


def final_population(pulse: Pulse, params: SystemParams = DEFAULT_PARAMS,
                     t_span: Optional[Tuple[float, float]] = None,
                     cfg: Optional[IntegratorConfig] = None) -> float:
    """p(t_f) from b1 = 1, b2 = 0 under the amplitude equations"""
    span = t_span or pulse.default_span()
    traj = integrate(amplitude_field, AmplitudeState.ground(), pulse, span, cfg, params=params)
    return _clip(population(traj.final_state))


def _extended_end(t_i: float, t_f: float) -> float:
    return 2.0 * t_f if t_f > 0 else t_f + (t_f - t_i)


def settled_population(pulse: Pulse, params: SystemParams = DEFAULT_PARAMS,
                       t_span: Optional[Tuple[float, float]] = None,
                       cfg: Optional[IntegratorConfig] = None) -> Tuple[float, float]:
    """p(t_f) and |p(2 t_f) - p(t_f)|.

    The second run continues from the state at t_f, so the first value is
    bit-identical to `final_population` over the same span.
    """
    t_i, t_f = t_span or pulse.default_span()
    head = integrate(amplitude_field, AmplitudeState.ground(), pulse, (t_i, t_f), cfg, params=params)
    tail = integrate(amplitude_field, head.final_state, pulse, (t_f, _extended_end(t_i, t_f)), cfg, params=params)
    p = _clip(population(head.final_state))
    return p, abs(_clip(population(tail.final_state)) - p)


def tail_change(pulse: Pulse, params: SystemParams = DEFAULT_PARAMS,
                t_span: Optional[Tuple[float, float]] = None,
                cfg: Optional[IntegratorConfig] = None) -> float:
    """|p(2 t_f) - p(t_f)|: how far p(t_f) is from the saturated p(+inf)"""
    t_f = (t_span or pulse.default_span())[1]
    change = settled_population(pulse, params, t_span, cfg)[1]
    if change > TAIL_TOL:
        logger.warning(f"final population not saturated at t_f={t_f:g}: tail change {change:.2e}")
    return change


def _evaluate(job) -> Tuple[float, float]:
    """Top-level worker so the pool can pickle it; returns (p, tail change or nan)"""
    pulse, delta0, beta, params, t_span, cfg, tail_check = job
    shifted = perturb(pulse, Perturbation(delta0=delta0, beta=beta))
    if tail_check:
        return settled_population(shifted, params, t_span, cfg)
    return final_population(shifted, params, t_span, cfg), float("nan")


@dataclass(frozen=True)
class ScanResult:
    """Final populations over a (delta0, beta) grid; rows follow beta, columns delta0"""

    delta0_axis: np.ndarray
    beta_axis: np.ndarray
    fidelity: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def profile(self) -> np.ndarray:
        """1-D view for scans with a single beta"""
        return self.fidelity[0]

    @property
    def mean(self) -> float:
        return float(np.mean(self.fidelity))

    def to_frame(self) -> pd.DataFrame:
        betas, deltas = np.meshgrid(self.beta_axis, self.delta0_axis, indexing="ij")
        return pd.DataFrame({
            "delta0": deltas.ravel(),
            "beta": betas.ravel(),
            "fidelity": self.fidelity.ravel(),
        })


def _axis(values: Sequence[float], name: str, increasing: bool) -> np.ndarray:
    axis = np.atleast_1d(np.asarray(values, dtype=float))
    if axis.ndim != 1 or axis.size == 0:
        raise ValueError(f"{name} grid must be a non-empty 1-D sequence")
    if increasing and np.any(np.diff(axis) <= 0):
        raise ValueError(f"{name} grid must be strictly increasing")
    return axis


def scan_2d(pulse: Pulse, delta0_grid: Sequence[float], beta_grid: Sequence[float],
            params: SystemParams = DEFAULT_PARAMS, cfg: Optional[IntegratorConfig] = None,
            t_span: Optional[Tuple[float, float]] = None, jobs: Optional[int] = None,
            tail_check: bool = True) -> ScanResult:
    """Independent final-population runs over the grid, merged in row-major order.

    With `tail_check` every run is continued to 2 t_f and the largest change
    in p is recorded as meta["max_tail_change"].
    """
    deltas = _axis(delta0_grid, "delta0", increasing=False)
    betas = _axis(beta_grid, "beta", increasing=False)
    cfg = cfg or IntegratorConfig()
    span = tuple(t_span or pulse.default_span())
    jobs = jobs or Config.JOBS

    tasks = [(pulse, float(d), float(b), params, span, cfg, tail_check) for b in betas for d in deltas]
    logger.info(f"scanning {pulse.kind} pulse over {len(betas)}x{len(deltas)} grid with {jobs} worker(s)")

    if jobs > 1 and len(tasks) > 1:
        with Pool(min(jobs, len(tasks))) as pool:
            values = pool.map(_evaluate, tasks)
    else:
        values = [_evaluate(task) for task in tasks]

    fidelity = np.array([v[0] for v in values], dtype=float).reshape(len(betas), len(deltas))
    max_tail = float(max(v[1] for v in values)) if tail_check else None
    if max_tail is not None and max_tail > TAIL_TOL:
        logger.warning(f"final population not saturated at t_f={span[1]:g}: "
                       f"largest tail change {max_tail:.2e} over the grid, widen t_span")
    meta = {
        "pulse": pulse.describe(),
        "t_span": list(span),
        "rel_tol": cfg.rel_tol,
        "abs_tol": cfg.abs_tol,
        "method": cfg.method,
        "params": params.model_dump(),
        "max_tail_change": max_tail,
        "version": __version__,
    }
    return ScanResult(delta0_axis=deltas, beta_axis=betas, fidelity=fidelity, meta=meta)


def scan_1d(pulse: Pulse, delta0_grid: Sequence[float], params: SystemParams = DEFAULT_PARAMS,
            cfg: Optional[IntegratorConfig] = None, t_span: Optional[Tuple[float, float]] = None,
            jobs: Optional[int] = None, tail_check: bool = True) -> ScanResult:
    """Detuning profile at beta = 0"""
    deltas = _axis(delta0_grid, "delta0", increasing=True)
    return scan_2d(pulse, deltas, [0.0], params, cfg, t_span, jobs, tail_check)


class Zone(BaseModel):
    """Closed rectangle in (delta0, beta)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    delta0: Tuple[float, float] = (-0.6, 0.6)
    beta: Tuple[float, float] = (0.0, 0.0)


ZONE_EDGE_TOL = 1e-12


def zone_average(result: ScanResult, zone: Zone) -> float:
    d_lo, d_hi = zone.delta0
    b_lo, b_hi = zone.beta
    d_mask = (result.delta0_axis >= d_lo - ZONE_EDGE_TOL) & (result.delta0_axis <= d_hi + ZONE_EDGE_TOL)
    b_mask = (result.beta_axis >= b_lo - ZONE_EDGE_TOL) & (result.beta_axis <= b_hi + ZONE_EDGE_TOL)
    selected = result.fidelity[np.ix_(b_mask, d_mask)]
    if selected.size == 0:
        raise EmptyZoneError(f"no grid points inside delta0 {zone.delta0} x beta {zone.beta}")
    return float(np.mean(selected))


def quadrant_average(result: ScanResult, delta0_negative: bool, beta_positive: bool) -> float:
    """Mean over a strict quadrant; points on either axis are excluded"""
    d_mask = result.delta0_axis < 0 if delta0_negative else result.delta0_axis > 0
    b_mask = result.beta_axis > 0 if beta_positive else result.beta_axis < 0
    selected = result.fidelity[np.ix_(b_mask, d_mask)]
    if selected.size == 0:
        raise EmptyZoneError("quadrant holds no grid points")
    return float(np.mean(selected))
