import argparse
import json
import logging
import sys
from typing import List, Optional

from resonance_control import __version__
from resonance_control.cli.orchestrator import CommandOrchestrator
from resonance_control.config import Config

logger = logging.getLogger(__name__)

SUBCOMMANDS = {
    "simulate": None,
    "design": ["adiabatic", "robust"],
    "portrait": None,
    "track": None,
    "scan": ["1d", "2d"],
    "optimize": None,
    "area": None,
}


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="JSON run config")
    parent.add_argument("--out", help=f"output directory (default: {Config.OUTPUT_DIR})")
    parent.add_argument("--samples", type=int, help="number of output samples")
    parent.add_argument("--tol", type=float, help="integrator rel/abs tolerance")
    parent.add_argument("--jobs", type=int, help="worker processes for scans and optimization")
    parent.add_argument("--verbose", action="store_true", help="debug logging")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resonance_control",
        description="Simulation and pulse design for the driven (1:2) resonance model",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common_flags()
    commands = parser.add_subparsers(dest="command", required=True)
    for name, children in SUBCOMMANDS.items():
        if children is None:
            commands.add_parser(name, parents=[common])
            continue
        group = commands.add_parser(name)
        nested = group.add_subparsers(dest="variant", required=True)
        for child in children:
            nested.add_parser(child, parents=[common])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    # Configure logging
    level = logging.DEBUG if args.verbose else getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    command = args.command if getattr(args, "variant", None) is None else f"{args.command} {args.variant}"
    overrides = {"samples": args.samples, "tol": args.tol, "jobs": args.jobs}
    result = CommandOrchestrator(args.out).run(command, args.config, overrides)

    if not result["success"]:
        print(f"❌ {result['error']}", file=sys.stderr)
        return 1

    summary = {k: v for k, v in result.get("summary", {}).items() if k != "meta"}
    print(f"✅ {command}: {json.dumps(summary, default=str)}")
    for path in result.get("files", []):
        print(f"   wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
