"""Command-line entry point.

Usage:
    vqcfd lbm run --grid 32x32 --steps 1000
    vqcfd vqcfd verify --grid 4x4 --steps 3
    vqcfd pqc train --size 16 --layers 8
    vqcfd qperf fit --table small
    vqcfd cperf sweep --grids 1e7 5e7
    vqcfd crossover
    vqcfd q5e7 --unit-scale table-units
    vqcfd serve --port 8000
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from vqcfd_api.commands import COMMAND_REGISTRY
from vqcfd_api.errors import VqcfdError
from vqcfd_api.logging_conf import configure_logging, start_run_context
from vqcfd_api.models.app import load_app_config
from vqcfd_api.models.perf import Backend, UnitScale
from vqcfd_api.utils.io_ops import dumps_json

logger = logging.getLogger(__name__)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML run configuration")
    common.add_argument("--seed", type=int, help="global seed")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--unit-scale", choices=[u.value for u in UnitScale], help="reading of the circuit-time fits")
    common.add_argument("--backend", choices=[b.value for b in Backend], help="small-circuit time model")
    common.add_argument("--hardware", type=Path, help="hardware spec TOML")
    common.add_argument(
        "--literal-formula",
        action="store_true",
        default=None,
        help="collision time exactly as the closed form is printed",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqcfd", description="Variational quantum CFD toolkit")
    commands = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    groups: dict[str, argparse._SubParsersAction] = {}

    for name, command in sorted(COMMAND_REGISTRY.items()):
        words = name.split()
        if len(words) == 1:
            sub = commands.add_parser(name, help=command.help, parents=[common])
        else:
            group, action = words
            if group not in groups:
                group_parser = commands.add_parser(group, help=f"{group} commands")
                groups[group] = group_parser.add_subparsers(dest="action", required=True)
            sub = groups[group].add_parser(action, help=command.help, parents=[common])
        if command.configure is not None:
            command.configure(sub)
        sub.set_defaults(command_name=name)
    return parser


def cli_overrides(args: argparse.Namespace) -> dict:
    """Flags that were given, keyed like the TOML file; they win over it."""
    pairs = {
        "seed": args.seed,
        "output_dir": args.out,
        "unit_scale": args.unit_scale,
        "backend": args.backend,
        "hardware": args.hardware,
        "literal_formula": args.literal_formula,
    }
    return {key: value for key, value in pairs.items() if value is not None}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()
    run_id = start_run_context()
    command = COMMAND_REGISTRY[args.command_name]
    logger.info(f"Starting '{command.name}' (run {run_id})")

    try:
        app = load_app_config(args.config, cli_overrides(args))
        summary = command.handler(args, app)
    except VqcfdError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(json.dumps({"error": type(e).__name__, "detail": str(e)}, sort_keys=True), file=sys.stderr)
        return 2

    sys.stdout.write(dumps_json(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
