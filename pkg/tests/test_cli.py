import json
import logging
import math
import os

import pandas as pd
import pytest

from resonance_control.cli.orchestrator import CommandOrchestrator
from resonance_control.cli.run_config import OptimizeConfig, Scan1DConfig, SimulateConfig, load_run_config
from resonance_control.export.writer import COLUMNS, read_header
from resonance_control.main import main
from setup_configs import CONFIGS, command_for, write_configs


def test_simulate_zero_pulse(tmp_path, write_config, capsys):
    path = write_config({"pulse": {"kind": "zero"}, "samples": 5, "name": "idle"})
    assert main(["simulate", "--config", path, "--out", str(tmp_path)]) == 0
    assert "✅" in capsys.readouterr().out

    csv_path = tmp_path / "idle.csv"
    first = csv_path.read_text().splitlines()[0]
    assert first.startswith("# ")
    header = read_header(str(csv_path))
    assert header["command"] == "simulate"
    assert header["config"]["pulse"]["kind"] == "zero"

    frame = pd.read_csv(csv_path, comment="#")
    assert list(frame.columns) == COLUMNS["trajectory"]
    assert len(frame) == 5
    assert frame["p"].iloc[-1] == 0.0

    sidecar = json.loads((tmp_path / "idle.json").read_text())
    assert sidecar["summary"]["final_p"] == 0.0
    assert sidecar["rows"] == 5


def test_unknown_key_is_rejected(tmp_path, write_config, capsys):
    path = write_config({"pulse": {"kind": "zero"}, "colour": "red"})
    assert main(["simulate", "--config", path, "--out", str(tmp_path)]) == 1
    assert "Invalid configuration" in capsys.readouterr().err
    assert not list(tmp_path.glob("*.csv"))


def test_invalid_robust_design_reports_theta(tmp_path, write_config, capsys):
    path = write_config({"design": {"branch": "minus"}})
    assert main(["design", "robust", "--config", path, "--out", str(tmp_path)]) == 1
    assert "theta" in capsys.readouterr().err
    assert not list(tmp_path.glob("*.csv"))


def test_bad_command_line():
    assert main(["teleport"]) == 2
    assert main(["design"]) == 2


def test_missing_config_file(tmp_path):
    result = CommandOrchestrator(str(tmp_path)).run("simulate", str(tmp_path / "absent.json"))
    assert not result["success"]


def test_inapplicable_override_warns(caplog):
    with caplog.at_level(logging.WARNING):
        cfg = load_run_config("area", overrides={"samples": 11, "tol": None})
    assert "--samples does not apply" in caplog.text
    assert cfg.pulse.kind == "tracking"


def test_overrides_reach_nested_settings():
    cfg = load_run_config("optimize", overrides={"jobs": 3, "tol": 1e-6})
    assert isinstance(cfg, OptimizeConfig)
    assert cfg.spec.jobs == 3
    assert cfg.spec.integrator.rel_tol == 1e-6
    scan = load_run_config("scan 1d", overrides={"jobs": 2, "samples": None})
    assert isinstance(scan, Scan1DConfig) and scan.jobs == 2
    simulate = load_run_config("simulate", overrides={"samples": 7, "tol": 1e-9})
    assert isinstance(simulate, SimulateConfig)
    assert simulate.samples == 7 and simulate.integrator().rel_tol == 1e-9


def test_optimize_initial_length_checked():
    with pytest.raises(ValueError):
        OptimizeConfig(spec={"n": 2}, initial=[0.1])


def test_undriven_portrait(tmp_path, write_config):
    path = write_config({"control": {"omega": 0.0, "delta": 0.4}})
    result = CommandOrchestrator(str(tmp_path)).run("portrait", path)
    assert result["success"]
    assert result["summary"]["fixed_points"] == 2
    assert result["summary"]["separatrix"] is False
    frame = pd.read_csv(tmp_path / "portrait.csv", comment="#")
    assert list(frame.columns) == COLUMNS["portrait"]
    assert len(frame) == 2


def test_portrait_needs_one_source(tmp_path, write_config):
    path = write_config({"control": {"omega": 1.0, "delta": 0.0}, "pulse": {"kind": "tracking"}, "time": 1.2})
    assert not CommandOrchestrator(str(tmp_path)).run("portrait", path)["success"]


def test_adiabatic_design_area(tmp_path):
    result = CommandOrchestrator(str(tmp_path)).run("design adiabatic", overrides={"samples": 21})
    assert result["success"]
    assert result["summary"]["area"] == pytest.approx(10 * math.pi, rel=1e-3)
    frame = pd.read_csv(tmp_path / "design_adiabatic.csv", comment="#")
    assert list(frame.columns) == ["t", "omega", "delta", "p_track"]
    assert len(frame) == 21


def test_area_writes_nothing(tmp_path, write_config):
    path = write_config({"pulse": {"kind": "square", "omega": 2.0, "T": 1.5}})
    result = CommandOrchestrator(str(tmp_path)).run("area", path)
    assert result["summary"]["area"] == pytest.approx(3.0)
    assert result["files"] == []


def test_scan_1d_with_square_pulse(tmp_path, write_config):
    path = write_config({
        "pulse": {"kind": "square", "omega": math.pi},
        "delta0": {"start": -0.5, "stop": 0.5, "num": 3},
        "zone": {"delta0": [-0.5, 0.5]},
        "name": "square_scan",
    })
    result = CommandOrchestrator(str(tmp_path)).run("scan 1d", path, {"jobs": 1})
    assert result["success"]
    summary = result["summary"]
    assert summary["min"] <= summary["zone_average"] <= summary["max"]
    frame = pd.read_csv(tmp_path / "square_scan.csv", comment="#")
    assert list(frame.columns) == COLUMNS["scan"]
    assert list(frame["delta0"]) == [-0.5, 0.0, 0.5]
    assert set(frame["beta"]) == {0.0}
    assert read_header(str(tmp_path / "square_scan.csv"))["config"]["pulse"]["kind"] == "square"
    assert summary["max_tail_change"] < 1e-6
    sidecar = json.loads((tmp_path / "square_scan.json").read_text())
    assert sidecar["summary"]["meta"]["max_tail_change"] == summary["max_tail_change"]


def test_robust_design_diagnostics(tmp_path, write_config):
    path = write_config({"design": {"coefficients": [-0.5]}, "diagnostics": True, "samples": 41})
    result = CommandOrchestrator(str(tmp_path)).run("design robust", path)
    assert result["success"]
    frame = pd.read_csv(tmp_path / "design_robust.csv", comment="#")
    assert list(frame.columns) == ["t", "theta", "alpha", "gamma", "omega", "delta", "delta_uncorrected"]
    gap = (frame["delta_uncorrected"] - frame["delta"]).abs().max()
    assert gap > 0.0
    assert result["summary"]["max_detuning_discrepancy"] == pytest.approx(gap, rel=1e-9, abs=1e-12)


def test_example_configs_validate(tmp_path):
    for path in write_configs(str(tmp_path)):
        filename = os.path.basename(path)
        cfg = load_run_config(command_for(filename), path)
        assert cfg.name == CONFIGS[filename].get("name")
