import logging
from enum import Enum

from fastapi import APIRouter, HTTPException, Query
from pydantic import BaseModel, Field, PositiveFloat

from vqcfd_api import cperf
from vqcfd_api.config import config
from vqcfd_api.crossover import CrossoverRow, PerformanceModels, q5e7_report, sweep
from vqcfd_api.models.hardware import HardwareSpec
from vqcfd_api.models.perf import Backend, TableKind, UnitScale
from vqcfd_api.qperf import bundled_table, load_records
from vqcfd_api.reports import fit_report

router = APIRouter()
logger = logging.getLogger(__name__)


class HardwarePreset(str, Enum):
    frontier = "frontier"
    frontier_calibrated = "frontier_calibrated"


def load_preset(preset: HardwarePreset) -> HardwareSpec:
    return HardwareSpec.from_toml(config.hardware_dir / f"{preset.value}.toml")


class OptimalNodes(BaseModel):
    grid: float
    n_nodes: int
    t_collision: float
    t_streaming: float
    t_step: float
    mlups: float


class CrossoverRequest(BaseModel):
    grids: list[PositiveFloat] = Field(max_length=64)
    unit_scale: UnitScale = UnitScale.seconds
    backend: Backend = Backend.ibm
    preset: HardwarePreset = HardwarePreset.frontier
    overlays: bool = False


@router.get("/health")
async def health():
    return {"status": "ok"}


@router.get("/q5e7")
def get_q5e7(
    unit_scale: UnitScale = UnitScale.seconds,
    backend: Backend = Backend.ibm,
    literal_formula: bool = False,
    preset: HardwarePreset = HardwarePreset.frontier,
):
    return q5e7_report(load_preset(preset), backend, literal_formula, unit_scale)


@router.get("/fits/{table}")
def get_fits(table: str):
    try:
        kind = TableKind(table)
    except ValueError:
        raise HTTPException(status_code=404, detail=f"No timing table named {table!r}")
    return fit_report(kind, load_records(bundled_table(kind)))


@router.get("/cperf/optimal-nodes", response_model=OptimalNodes)
def get_optimal_nodes(
    grid: float = Query(gt=0),
    preset: HardwarePreset = HardwarePreset.frontier,
    literal_formula: bool = False,
):
    best = cperf.optimal_nodes(grid, load_preset(preset), literal=literal_formula)
    return OptimalNodes(
        grid=best.grid,
        n_nodes=best.n_nodes,
        t_collision=best.t_collision,
        t_streaming=best.t_streaming,
        t_step=best.t_step,
        mlups=best.mlups,
    )


@router.post("/crossover", response_model=list[CrossoverRow])
def post_crossover(request: CrossoverRequest):
    models = PerformanceModels.published(request.unit_scale, request.backend, load_preset(request.preset))
    overlays = {kind: load_records(bundled_table(kind)) for kind in TableKind} if request.overlays else None
    rows = sweep(request.grids, models, overlays)
    logger.debug(f"Crossover request for {len(request.grids)} grids returned {len(rows)} rows")
    return rows
