#!/usr/bin/env python3
"""
Write example run configs (JSON) for every command into configs/.
"""

import json
import os

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")

MULTI_COEFFICIENTS = [-2.12, -0.86, 0.35]

CONFIGS = {
    "simulate_tracking.json": {
        "name": "tracking_trajectory",
        "pulse": {"kind": "tracking", "design": {"omega0": 10.0, "T": 1.0}},
        "samples": 801,
    },
    "simulate_robust.json": {
        "name": "robust_trajectory",
        "pulse": {"kind": "robust", "design": {"epsilon": 0.03, "coefficients": [-0.5]}},
        "samples": 801,
    },
    "simulate_rabi.json": {
        "name": "rabi_trajectory",
        "pulse": {"kind": "square", "omega": 31.41592653589793, "T": 1.0},
        "samples": 401,
    },
    "design_adiabatic.json": {
        "name": "tracking_pulse",
        "design": {"omega0": 10.0, "T": 1.0, "branch": "zero"},
    },
    "design_robust.json": {
        "name": "robust_pulse",
        "design": {"epsilon": 0.03, "coefficients": [-0.5]},
        "diagnostics": True,
    },
    "design_robust_multi.json": {
        "name": "robust_pulse_multi",
        "design": {"epsilon": 0.03, "coefficients": MULTI_COEFFICIENTS},
    },
    "portrait_negative_offset.json": {
        "name": "portrait_negative_offset",
        "pulse": {"kind": "tracking", "perturbation": {"delta0": -0.6}},
        "time": 1.2,
        "contours": 8,
    },
    "portrait_positive_offset.json": {
        "name": "portrait_positive_offset",
        "pulse": {"kind": "tracking", "perturbation": {"delta0": 0.6}},
        "time": 1.2,
        "contours": 8,
    },
    "track_tracking_offset.json": {
        "name": "track_tracking_offset",
        "pulse": {"kind": "tracking", "perturbation": {"delta0": -0.6}},
        "branch": "zero",
    },
    "track_robust_offset.json": {
        "name": "track_robust_offset",
        "pulse": {"kind": "robust", "design": {"coefficients": [-0.5]}, "perturbation": {"delta0": -0.6}},
    },
    "scan_1d_robust.json": {
        "name": "profile_robust",
        "pulse": {"kind": "robust", "design": {"coefficients": [-0.5]}},
        "delta0": {"start": -0.6, "stop": 0.6, "num": 61},
        "zone": {"delta0": [-0.6, 0.6]},
    },
    "scan_1d_tracking.json": {
        "name": "profile_tracking",
        "pulse": {"kind": "tracking"},
        "delta0": {"start": -0.6, "stop": 0.6, "num": 61},
        "zone": {"delta0": [-0.6, 0.6]},
    },
    "scan_2d_tracking.json": {
        "name": "map_tracking",
        "pulse": {"kind": "tracking"},
        "delta0": {"start": -1.0, "stop": 1.0, "num": 41},
        "beta": {"start": -0.2, "stop": 0.2, "num": 41},
    },
    "scan_2d_robust_multi.json": {
        "name": "map_robust_multi",
        "pulse": {"kind": "robust", "design": {"coefficients": MULTI_COEFFICIENTS}},
        "delta0": {"start": -0.6, "stop": 0.6, "num": 25},
        "beta": {"start": -0.1, "stop": 0.1, "num": 11},
        "zone": {"delta0": [-0.6, 0.6], "beta": [-0.1, 0.1]},
    },
    "optimize_one.json": {
        "name": "optimize_one",
        "spec": {"n": 1, "budget": 500},
    },
    "optimize_three.json": {
        "name": "optimize_three",
        "spec": {"n": 3, "beta_range": [-0.1, 0.1], "budget": 3000},
        "initial": MULTI_COEFFICIENTS,
    },
    "area_robust.json": {
        "pulse": {"kind": "robust", "design": {"coefficients": [-0.5]}},
    },
}


PREFIXES = [
    ("design_adiabatic", "design adiabatic"),
    ("design_robust", "design robust"),
    ("scan_1d", "scan 1d"),
    ("scan_2d", "scan 2d"),
    ("simulate", "simulate"),
    ("portrait", "portrait"),
    ("track", "track"),
    ("optimize", "optimize"),
    ("area", "area"),
]


def command_for(filename: str) -> str:
    for prefix, command in PREFIXES:
        if filename.startswith(prefix):
            return command
    raise ValueError(f"no command for {filename}")


def write_configs(directory: str = CONFIG_DIR) -> list:
    """Write every example config; returns the written paths"""
    os.makedirs(directory, exist_ok=True)
    written = []
    for filename, payload in CONFIGS.items():
        path = os.path.join(directory, filename)
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        written.append(path)
    return written


if __name__ == "__main__":
    print("🛠️  Writing example run configs...")
    for path in write_configs():
        print(f"✅ {os.path.relpath(path)}")
    print(f"\n📁 {len(CONFIGS)} configs in {CONFIG_DIR}")
