import logging

from vqcfd_api.commands.options import add_lattice_arguments, lattice_overrides
from vqcfd_api.commands.registry import register_command
from vqcfd_api.lbm import run_simulation, viscosity
from vqcfd_api.models.app import validate_section
from vqcfd_api.models.lbm import SimulationConfig
from vqcfd_api.reports import write_run_manifest, write_snapshots

logger = logging.getLogger(__name__)


def configure(parser):
    add_lattice_arguments(parser)
    parser.add_argument("--snapshot-every", type=int, help="steps between stored snapshots")


@register_command("lbm run", help="run the classical D2Q9 solver", configure=configure)
def lbm_run(args, app):
    overrides = lattice_overrides(args)
    if args.snapshot_every is not None:
        overrides["snapshot_every"] = args.snapshot_every
    sim = validate_section(SimulationConfig, {**app.lbm.model_dump(), **overrides}, "lbm")
    snapshots = run_simulation(sim)

    path = app.output_dir / (sim.output_path or "lbm/snapshots.csv")
    outputs = [write_snapshots(path, snapshots)]
    write_run_manifest(app.model_copy(update={"lbm": sim}), "lbm run", outputs)

    final = snapshots[-1].fields
    return {
        "grid": [sim.nx, sim.ny],
        "steps": sim.steps,
        "viscosity": viscosity(sim.tau),
        "snapshots": len(snapshots),
        "mass": float(final.rho.sum()),
        "max_speed": float((final.ux**2 + final.uy**2).max() ** 0.5),
        "output": str(path),
    }
