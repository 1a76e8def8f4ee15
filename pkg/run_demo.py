#!/usr/bin/env python3
"""
Demo script: regenerates the data behind every figure through the command orchestrator
"""

import argparse
import os
import sys
import time

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from resonance_control.cli.orchestrator import CommandOrchestrator
from resonance_control.config import Config
from setup_configs import CONFIG_DIR, command_for, write_configs

# Ordered from seconds to minutes of runtime
DEMO_RUNS = [
    "design_adiabatic.json",
    "design_robust.json",
    "design_robust_multi.json",
    "simulate_rabi.json",
    "simulate_tracking.json",
    "simulate_robust.json",
    "portrait_negative_offset.json",
    "portrait_positive_offset.json",
    "track_tracking_offset.json",
    "track_robust_offset.json",
    "scan_1d_tracking.json",
    "scan_1d_robust.json",
    "scan_2d_robust_multi.json",
    "scan_2d_tracking.json",
    "optimize_one.json",
]


def check_dependencies():
    """Check if required dependencies are installed"""
    print("🔍 Checking dependencies...")

    try:
        import numpy
        import pandas
        import pydantic
        import scipy
        print("✅ Python dependencies are installed")
    except ImportError as e:
        print(f"❌ Missing Python dependency: {e}")
        print("Run: pip install -r requirements.txt")
        return False

    return True


def main():
    """Main demo function"""
    parser = argparse.ArgumentParser(description="Regenerate figure data")
    parser.add_argument("--out", default=Config.OUTPUT_DIR)
    parser.add_argument("--jobs", type=int, default=Config.JOBS)
    parser.add_argument("--skip-slow", action="store_true", help="skip the 2-D maps and the optimizer")
    args = parser.parse_args()

    print("🌀 Resonance Control - Demo")
    print("=" * 50)

    if not check_dependencies():
        return 1

    write_configs()
    orchestrator = CommandOrchestrator(args.out)
    runs = [r for r in DEMO_RUNS if not (args.skip_slow and r.startswith(("scan_2d", "optimize")))]

    failures = 0
    for filename in runs:
        command = command_for(filename)
        print(f"\n🚀 {command} ({filename})")
        started = time.time()
        overrides = {"jobs": args.jobs} if command.startswith(("scan", "optimize")) else {}
        result = orchestrator.run(command, os.path.join(CONFIG_DIR, filename), overrides)
        if not result["success"]:
            print(f"❌ {result['error']}")
            failures += 1
            continue
        summary = {k: v for k, v in result["summary"].items() if k != "meta"}
        print(f"✅ {summary}")
        for path in result["files"]:
            print(f"   📄 {path}")
        print(f"   ({time.time() - started:.1f}s)")

    print("\n" + "=" * 50)
    if failures:
        print(f"⚠️  {failures} run(s) failed")
        return 1
    print(f"🎉 Figure data written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
