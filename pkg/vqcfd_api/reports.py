"""Report payloads and the CSV/JSON files the commands write."""
from pathlib import Path

import numpy as np

from vqcfd_api import qperf
from vqcfd_api.cperf import StepBreakdown
from vqcfd_api.crossover import CROSSOVER_COLUMNS, CrossoverRow
from vqcfd_api.lbm import Snapshot
from vqcfd_api.models.app import AppConfig
from vqcfd_api.models.perf import TableKind, TimingRecord, UnitScale
from vqcfd_api.utils.io_ops import write_csv, write_json, write_manifest
from vqcfd_api.verification import TRACE_COLUMNS, VerificationReport

SNAPSHOT_COLUMNS = ("step", "x", "y", "rho", "ux", "uy")
SWEEP_COLUMNS = ("grid", "n_nodes", "t_collision", "t_streaming", "t_step", "mlups")
VECTOR_COLUMNS = ("index", "value")


def fit_report(kind: TableKind, records: list[TimingRecord]) -> dict:
    refit = qperf.refit_table(kind, records)
    published = {
        unit.value: (qperf.published_small_fit(unit) if kind == TableKind.small else qperf.published_large_fit(unit))
        for unit in UnitScale
    }
    report = {
        "table": kind.value,
        "n": len(records),
        "refit": refit.model_dump(mode="json"),
        "published": {unit: fit.model_dump(mode="json") for unit, fit in published.items()},
    }
    if kind == TableKind.small:
        report["ionq"] = qperf.ionq_small_fit().model_dump(mode="json")
    return report


def snapshot_rows(snapshots: list[Snapshot]):
    for snap in snapshots:
        rho, ux, uy = snap.fields.rho, snap.fields.ux, snap.fields.uy
        ny, nx = rho.shape
        for y in range(ny):
            for x in range(nx):
                yield (snap.step, x, y, float(rho[y, x]), float(ux[y, x]), float(uy[y, x]))


def write_snapshots(path: Path, snapshots: list[Snapshot]) -> Path:
    return write_csv(path, SNAPSHOT_COLUMNS, snapshot_rows(snapshots))


def write_vector(path: Path, vector) -> Path:
    return write_csv(path, VECTOR_COLUMNS, ((i, float(v)) for i, v in enumerate(np.asarray(vector))))


def write_verification(out_dir: Path, report: VerificationReport) -> list[Path]:
    verify_dir = Path(out_dir) / "verify"
    return [
        write_csv(verify_dir / "traces.csv", TRACE_COLUMNS, report.rows()),
        write_json(verify_dir / "summary.json", report.summary()),
    ]


def write_crossover(path: Path, rows: list[CrossoverRow]) -> Path:
    return write_csv(path, CROSSOVER_COLUMNS, (row.as_tuple() for row in rows))


def sweep_rows(breakdowns: list[StepBreakdown]):
    for b in breakdowns:
        yield (b.grid, b.n_nodes, b.t_collision, b.t_streaming, b.t_step, b.mlups)


def write_sweep(path: Path, breakdowns: list[StepBreakdown]) -> Path:
    return write_csv(path, SWEEP_COLUMNS, sweep_rows(breakdowns))


def write_run_manifest(app: AppConfig, command: str, outputs: list[Path]) -> Path:
    return write_manifest(app.output_dir, command, app.model_dump(mode="json"), outputs)
