import argparse


def parse_grid(text: str) -> tuple[int, int]:
    """``"NXxNY"`` to ``(nx, ny)``."""
    try:
        nx, ny = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 32x32, got {text!r}")
    if nx < 1 or ny < 1:
        raise argparse.ArgumentTypeError(f"grid dimensions must be positive, got {text!r}")
    return nx, ny


def add_lattice_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", type=parse_grid, help="lattice size as NXxNY")
    parser.add_argument("--steps", type=int, help="number of LBM steps")


def lattice_overrides(args: argparse.Namespace) -> dict:
    overrides = {}
    if args.grid is not None:
        overrides["nx"], overrides["ny"] = args.grid
    if args.steps is not None:
        overrides["steps"] = args.steps
    return overrides
