import logging
import math
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from resonance_control.analysis.phase_space import fixed_point_track, portrait, separatrix_at_latitude
from resonance_control.analysis.robustness import quadrant_average, scan_1d, scan_2d, zone_average
from resonance_control.cli.run_config import RunConfig, load_run_config
from resonance_control.control.adiabatic import TrackingPulse, tracking_controls
from resonance_control.control.optimizer import optimize
from resonance_control.control.pulses import pulse_area
from resonance_control.control.robust import (
    RobustPulse,
    detuning_discrepancy,
    gamma_expansion,
    shape_fields,
    theta_profile,
    uncorrected_detuning,
)
from resonance_control.errors import EmptyZoneError, NoSeparatrixError, ResonanceError
from resonance_control.export.writer import ResultWriter
from resonance_control.model.core import AmplitudeState, amplitude_array_to_bloch, amplitude_field, population
from resonance_control.model.integrator import integrate

logger = logging.getLogger(__name__)


class CommandOrchestrator:
    def __init__(self, output_dir: Optional[str] = None):
        self.writer = ResultWriter(output_dir)
        self.commands = {
            "simulate": self.simulate,
            "design adiabatic": self.design_adiabatic,
            "design robust": self.design_robust,
            "portrait": self.portrait,
            "track": self.track,
            "scan 1d": self.scan_1d,
            "scan 2d": self.scan_2d,
            "optimize": self.optimize,
            "area": self.area,
        }

    def run(self, command: str, config_path: Optional[str] = None,
            overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Validate the run config, execute the command and write its outputs"""
        if command not in self.commands:
            return {"success": False, "error": f"Unknown command '{command}'"}
        try:
            cfg = load_run_config(command, config_path, overrides)
        except (ValidationError, ValueError, OSError) as e:
            logger.error(f"Invalid configuration for {command}: {e}")
            return {"success": False, "error": f"Invalid configuration: {str(e)}"}

        logger.info(f"Running {command}")
        try:
            result = self.commands[command](cfg, self._resolved(command, cfg))
        except (ResonanceError, ValidationError, ValueError, ArithmeticError, OSError) as e:
            logger.error(f"{command} failed: {e}")
            return {"success": False, "error": f"{command} failed: {str(e)}"}

        if result.get("success"):
            logger.info(f"Finished {command}")
        return result

    def _resolved(self, command: str, cfg: RunConfig) -> Dict[str, Any]:
        return {"command": command, "config": cfg.model_dump(mode="json")}

    def _stem(self, command: str, cfg: RunConfig) -> str:
        return cfg.name or command.replace(" ", "_")

    def _finish(self, kind: str, payload, command: str, cfg: RunConfig,
                resolved: Dict[str, Any], summary: Dict[str, Any]) -> Dict[str, Any]:
        written = self.writer.write(kind, payload, self._stem(command, cfg), resolved, summary)
        if not written["success"]:
            return written
        return {"success": True, "summary": summary, "files": [written["csv"], written["sidecar"]]}

    def simulate(self, cfg, resolved):
        pulse = cfg.pulse
        span = cfg.t_span or pulse.default_span()
        times = np.linspace(span[0], span[1], cfg.samples)
        traj = integrate(amplitude_field, AmplitudeState.ground(), pulse, span, cfg.integrator(),
                         sample_times=times, params=cfg.params)
        final_p = min(1.0, max(0.0, population(traj.final_state)))
        logger.info(f"final population {final_p:.10f}")
        summary = {"final_p": final_p, "steps": traj.steps}
        return self._finish("trajectory", traj, "simulate", cfg, resolved, summary)

    def design_adiabatic(self, cfg, resolved):
        pulse = TrackingPulse(design=cfg.design)
        span = cfg.t_span or pulse.default_span()
        rows = []
        for t in np.linspace(span[0], span[1], cfg.samples):
            ctrl, p = tracking_controls(cfg.design, t)
            rows.append((t, ctrl.omega, ctrl.delta, p))
        frame = pd.DataFrame(rows, columns=["t", "omega", "delta", "p_track"])
        area = pulse_area(pulse, span)
        logger.info(f"tracking pulse area {area:.6f} = {area / math.pi:.4f} pi")
        summary = {"area": area, "area_over_pi": area / math.pi, "nominal_area": pulse.nominal_area()}
        return self._finish("pulse", frame, "design adiabatic", cfg, resolved, summary)

    def design_robust(self, cfg, resolved):
        pulse = RobustPulse(design=cfg.design, params=cfg.params)
        solution = pulse.solution
        solution.require_valid()
        span = cfg.t_span or pulse.default_span()
        rows = []
        for t in np.linspace(span[0], span[1], cfg.samples):
            theta, _ = theta_profile(cfg.design, t)
            ctrl = shape_fields(cfg.design, solution, t, cfg.params)
            row = {"t": t, "theta": theta, "alpha": solution.alpha(theta),
                   "gamma": gamma_expansion(cfg.design, theta)[0], "omega": ctrl.omega, "delta": ctrl.delta}
            if cfg.diagnostics:
                row["delta_uncorrected"] = uncorrected_detuning(cfg.design, solution, t, cfg.params)
            rows.append(row)
        frame = pd.DataFrame(rows)
        area = pulse_area(pulse, span)
        logger.info(f"robust pulse area {area:.6f} = {area / math.pi:.4f} pi")
        summary = {"area": area, "area_over_pi": area / math.pi,
                   "target_population": cfg.design.target_population}
        if cfg.diagnostics:
            gap = detuning_discrepancy(cfg.design, solution, frame["t"].to_numpy(), cfg.params)
            summary["max_detuning_discrepancy"] = float(np.max(np.abs(gap)))
        return self._finish("pulse", frame, "design robust", cfg, resolved, summary)

    def portrait(self, cfg, resolved):
        ctrl = cfg.controls()
        result = portrait(ctrl, cfg.samples, cfg.contours)
        summary = {
            "omega": ctrl.omega,
            "delta": ctrl.delta,
            "fixed_points": len(result.fixed_points),
            "target_kind": result.target_kind.value,
            "separatrix": result.separatrix is not None,
        }
        logger.info(f"portrait at Omega={ctrl.omega:.6f}, Delta={ctrl.delta:.6f}: target {summary['target_kind']}")
        return self._finish("portrait", result, "portrait", cfg, resolved, summary)

    def track(self, cfg, resolved):
        pulse = cfg.pulse
        span = cfg.t_span or pulse.default_span()
        times = np.linspace(span[0], span[1], cfg.samples)
        traj = integrate(amplitude_field, AmplitudeState.ground(), pulse, span, cfg.integrator(),
                         sample_times=times, params=cfg.params)
        bloch = amplitude_array_to_bloch(traj.values)
        fp_p, fp_alpha = fixed_point_track(pulse, times, cfg.branch)

        sep_plus = np.full(len(times), math.nan)
        sep_minus = np.full(len(times), math.nan)
        for i, t in enumerate(times):
            try:
                branches = separatrix_at_latitude(pulse(t), bloch[i, 2])
            except NoSeparatrixError:
                continue
            if branches is not None:
                sep_plus[i], sep_minus[i] = branches

        frame = pd.DataFrame({
            "t": times, "p": bloch[:, 2], "alpha": traj.alphas(), "pi_x": bloch[:, 0], "pi_y": bloch[:, 1],
            "fp_p": fp_p, "fp_alpha": fp_alpha, "sep_alpha_plus": sep_plus, "sep_alpha_minus": sep_minus,
        })
        summary = {"final_p": float(bloch[-1, 2])}
        return self._finish("track", frame, "track", cfg, resolved, summary)

    def scan_1d(self, cfg, resolved):
        result = scan_1d(cfg.pulse, cfg.delta0.values(), cfg.params, cfg.integrator(), cfg.t_span, cfg.jobs)
        summary = self._scan_summary(result, cfg.zone)
        return self._finish("scan", result, "scan 1d", cfg, resolved, {**summary, "meta": result.meta})

    def scan_2d(self, cfg, resolved):
        result = scan_2d(cfg.pulse, cfg.delta0.values(), cfg.beta.values(), cfg.params,
                         cfg.integrator(), cfg.t_span, cfg.jobs)
        summary = self._scan_summary(result, cfg.zone)
        for label, negative, positive in (("quadrant_neg_delta0_pos_beta", True, True),
                                          ("quadrant_pos_delta0_neg_beta", False, False)):
            try:
                summary[label] = quadrant_average(result, negative, positive)
            except EmptyZoneError:
                pass
        return self._finish("scan", result, "scan 2d", cfg, resolved, {**summary, "meta": result.meta})

    def _scan_summary(self, result, zone) -> Dict[str, Any]:
        summary = {"mean": result.mean, "min": float(result.fidelity.min()), "max": float(result.fidelity.max()),
                   "max_tail_change": result.meta.get("max_tail_change")}
        if zone is not None:
            summary["zone_average"] = zone_average(result, zone)
            logger.info(f"zone average {summary['zone_average']:.6f}")
        return summary

    def optimize(self, cfg, resolved):
        result = optimize(cfg.spec, cfg.initial)
        return self._finish("trace", result, "optimize", cfg, resolved, result.summary())

    def area(self, cfg, resolved):
        area = pulse_area(cfg.pulse, cfg.t_span)
        logger.info(f"pulse area {area:.6f} = {area / math.pi:.4f} pi")
        return {"success": True, "summary": {"area": area, "area_over_pi": area / math.pi}, "files": []}
