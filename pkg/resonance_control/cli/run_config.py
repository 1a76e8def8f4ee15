import json
import logging
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from resonance_control.analysis.robustness import Zone
from resonance_control.control.adiabatic import TrackingDesign, TrackingPulse
from resonance_control.control.optimizer import OptimizeSpec
from resonance_control.control.pulses import SquarePulse, ZeroPulse
from resonance_control.control.robust import RobustDesign, RobustPulse
from resonance_control.model.core import DEFAULT_PARAMS, ControlSample, SystemParams
from resonance_control.model.integrator import IntegratorConfig

logger = logging.getLogger(__name__)

PulseSpec = Annotated[Union[ZeroPulse, SquarePulse, TrackingPulse, RobustPulse], Field(discriminator="kind")]


class RunConfig(BaseModel):
    """Base of every command config; unknown keys are rejected"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Optional[str] = None   # output file stem


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    start: float
    stop: float
    num: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_order(self):
        if self.num > 1 and not self.start < self.stop:
            raise ValueError("grid start must be below stop")
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


class Controls(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    omega: float = Field(ge=0)
    delta: float

    def sample(self) -> ControlSample:
        return ControlSample(self.omega, self.delta)


class IntegrationOptions(RunConfig):
    params: SystemParams = DEFAULT_PARAMS
    t_span: Optional[Tuple[float, float]] = None
    tol: Optional[float] = Field(None, gt=0)
    method: Optional[Literal["RK45", "DOP853"]] = None

    def integrator(self) -> IntegratorConfig:
        cfg = IntegratorConfig()
        if self.tol is not None:
            cfg = cfg.with_tolerance(self.tol)
        if self.method is not None:
            cfg = cfg.model_copy(update={"method": self.method})
        return cfg


class SimulateConfig(IntegrationOptions):
    pulse: PulseSpec = TrackingPulse()
    samples: int = Field(401, ge=2)


class AdiabaticDesignConfig(RunConfig):
    design: TrackingDesign = TrackingDesign()
    t_span: Optional[Tuple[float, float]] = None
    samples: int = Field(401, ge=2)


class RobustDesignConfig(RunConfig):
    design: RobustDesign = RobustDesign()
    params: SystemParams = DEFAULT_PARAMS
    t_span: Optional[Tuple[float, float]] = None
    samples: int = Field(401, ge=2)
    # adds the detuning computed without the theta' factor
    diagnostics: bool = False


class PortraitConfig(RunConfig):
    pulse: Optional[PulseSpec] = None
    time: Optional[float] = None
    control: Optional[Controls] = None
    samples: int = Field(401, ge=2)
    contours: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _one_source(self):
        from_pulse = self.pulse is not None and self.time is not None
        if from_pulse == (self.control is not None):
            raise ValueError("give either pulse and time, or control")
        return self

    def controls(self) -> ControlSample:
        return self.control.sample() if self.control is not None else self.pulse(self.time)


class TrackConfig(IntegrationOptions):
    pulse: PulseSpec = TrackingPulse()
    samples: int = Field(401, ge=2)
    branch: Literal["zero", "pi"] = "zero"


class Scan1DConfig(IntegrationOptions):
    pulse: PulseSpec = Field(default_factory=RobustPulse)
    delta0: GridSpec = GridSpec(start=-0.6, stop=0.6, num=61)
    zone: Optional[Zone] = None
    jobs: Optional[int] = Field(None, ge=1)


class Scan2DConfig(IntegrationOptions):
    pulse: PulseSpec = TrackingPulse()
    delta0: GridSpec = GridSpec(start=-1.0, stop=1.0, num=41)
    beta: GridSpec = GridSpec(start=-0.2, stop=0.2, num=41)
    zone: Optional[Zone] = None
    jobs: Optional[int] = Field(None, ge=1)


class OptimizeConfig(RunConfig):
    spec: OptimizeSpec = OptimizeSpec()
    initial: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_initial(self):
        if self.initial is not None and len(self.initial) != self.spec.n:
            raise ValueError(f"initial needs {self.spec.n} coefficients")
        return self


class AreaConfig(RunConfig):
    pulse: PulseSpec = TrackingPulse()
    t_span: Optional[Tuple[float, float]] = None


COMMAND_CONFIGS = {
    "simulate": SimulateConfig,
    "design adiabatic": AdiabaticDesignConfig,
    "design robust": RobustDesignConfig,
    "portrait": PortraitConfig,
    "track": TrackConfig,
    "scan 1d": Scan1DConfig,
    "scan 2d": Scan2DConfig,
    "optimize": OptimizeConfig,
    "area": AreaConfig,
}


def apply_overrides(command: str, raw: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Fold --samples/--tol/--jobs into the raw config; inapplicable ones are logged and dropped"""
    model = COMMAND_CONFIGS[command]
    merged = dict(raw)
    for key, value in overrides.items():
        if value is None:
            continue
        if key in model.model_fields:
            merged[key] = value
        elif command == "optimize" and key in ("jobs", "tol"):
            spec = dict(merged.get("spec", {}))
            if key == "jobs":
                spec["jobs"] = value
            else:
                spec["integrator"] = {**spec.get("integrator", {}), "rel_tol": value, "abs_tol": value}
            merged["spec"] = spec
        else:
            logger.warning(f"--{key} does not apply to '{command}' and is ignored")
    return merged


def load_run_config(command: str, path: Optional[str] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Read a JSON run config, apply CLI overrides and validate it before any computation"""
    if command not in COMMAND_CONFIGS:
        raise ValueError(f"unknown command '{command}'")
    raw: Dict[str, Any] = {}
    if path:
        with open(path) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError(f"{path} must hold a JSON object")
    raw = apply_overrides(command, raw, overrides or {})
    return COMMAND_CONFIGS[command].model_validate(raw)
