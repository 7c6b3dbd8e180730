"""Runtime-model subcommands: fits, classical sweeps, crossover and Q_5E7."""
import logging

from vqcfd_api import cperf
from vqcfd_api.commands.registry import register_command
from vqcfd_api.crossover import PerformanceModels, q5e7_report, sweep
from vqcfd_api.models.hardware import HardwareSpec
from vqcfd_api.models.perf import TableKind
from vqcfd_api.qperf import load_records
from vqcfd_api.reports import fit_report, write_crossover, write_run_manifest, write_sweep
from vqcfd_api.utils.io_ops import write_json

logger = logging.getLogger(__name__)


def _table_path(app, kind: TableKind):
    return app.tables.small if kind == TableKind.small else app.tables.large


def _models(app) -> PerformanceModels:
    models = PerformanceModels.published(
        app.unit_scale, app.backend, HardwareSpec.from_toml(app.hardware), app.literal_formula
    )
    models.n_min, models.n_max = app.sweep.n_min, app.sweep.n_max
    return models


def _grids(args, app) -> list[float]:
    return args.grids if args.grids is not None else list(app.sweep.grids)


def configure_fit(parser):
    parser.add_argument("--table", choices=["small", "large", "both"], default="both", help="timing table to refit")


@register_command("qperf fit", help="refit the circuit-time tables", configure=configure_fit)
def qperf_fit(args, app):
    kinds = list(TableKind) if args.table == "both" else [TableKind(args.table)]
    reports = {kind.value: fit_report(kind, load_records(_table_path(app, kind))) for kind in kinds}
    outputs = [write_json(app.output_dir / "fits.json", reports)]
    write_run_manifest(app, "qperf fit", outputs)
    return {
        name: {key: report["refit"][key] for key in ("coefficients", "r2", "adjusted_r2", "unit_scale")}
        for name, report in reports.items()
    }


def configure_grids(parser):
    parser.add_argument("--grids", type=float, nargs="+", help="grid sizes to evaluate")


@register_command("cperf sweep", help="optimal node count and step time per grid", configure=configure_grids)
def cperf_sweep(args, app):
    spec = HardwareSpec.from_toml(app.hardware)
    grids = _grids(args, app)
    optima = [cperf.optimal_nodes(g, spec, app.sweep.n_min, app.sweep.n_max, app.literal_formula) for g in grids]
    curve = cperf.node_curve(app.sweep.curve_grid, spec, app.sweep.n_min, app.sweep.n_max, app.literal_formula)
    outputs = [
        write_sweep(app.output_dir / "cperf" / "sweep.csv", optima),
        write_sweep(app.output_dir / "cperf" / "node_curve.csv", curve),
    ]
    write_run_manifest(app, "cperf sweep", outputs)
    return {
        "hardware": spec.name,
        "optimal_nodes": {f"{b.grid:g}": b.n_nodes for b in optima},
        "mlups": {f"{b.grid:g}": b.mlups for b in optima},
    }


@register_command("crossover", help="quantum to classical time ratio per grid", configure=configure_grids)
def crossover(args, app):
    models = _models(app)
    overlays = None
    if app.sweep.overlays:
        overlays = {kind: load_records(_table_path(app, kind)) for kind in TableKind}
    rows = sweep(_grids(args, app), models, overlays)
    outputs = [write_crossover(app.output_dir / "crossover.csv", rows)]
    write_run_manifest(app, "crossover", outputs)
    model_rows = [row for row in rows if row.source == "model"]
    return {"rows": len(rows), "ratios": {f"{row.grid:g}": row.ratio for row in model_rows}}


@register_command("q5e7", help="quantum to classical time ratio at fifty million grid points")
def q5e7(args, app):
    report = q5e7_report(HardwareSpec.from_toml(app.hardware), app.backend, app.literal_formula, app.unit_scale)
    report["parameters"] = app.model_dump(mode="json")
    outputs = [write_json(app.output_dir / "q5e7.json", report)]
    write_run_manifest(app, "q5e7", outputs)
    return report
