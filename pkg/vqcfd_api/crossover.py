"""Quantum versus classical time per LBM step across grid sizes."""
import logging
import math
from dataclasses import dataclass, field

from pydantic import BaseModel, ConfigDict

from vqcfd_api import cperf, qperf
from vqcfd_api.models.hardware import HardwareSpec
from vqcfd_api.models.perf import Backend, CircuitTimeFit, QuantumCostParams, TableKind, TimingRecord, UnitScale

logger = logging.getLogger(__name__)

Q5E7_GRID = 5e7

CROSSOVER_COLUMNS = ("grid", "n_q", "t_quantum", "n_nodes_opt", "t_classical", "ratio", "source")


class CrossoverRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    grid: float
    n_q: int
    t_quantum: float
    n_nodes_opt: int
    t_classical: float
    ratio: float
    source: str = "model"

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in CROSSOVER_COLUMNS)


@dataclass
class PerformanceModels:
    small_fit: CircuitTimeFit
    large_fit: CircuitTimeFit
    hardware: HardwareSpec = field(default_factory=HardwareSpec)
    params: QuantumCostParams = field(default_factory=QuantumCostParams)
    literal: bool = False
    n_min: int = 1
    n_max: int | None = None

    @classmethod
    def published(
        cls,
        unit: UnitScale = UnitScale.seconds,
        backend: Backend = Backend.ibm,
        hardware: HardwareSpec | None = None,
        literal: bool = False,
    ) -> "PerformanceModels":
        small, large = qperf.published_fits(unit, backend)
        return cls(small_fit=small, large_fit=large, hardware=hardware or HardwareSpec(), literal=literal)

    def quantum_time(self, n_q: int) -> float:
        return qperf.tq_per_step(n_q, self.params, self.small_fit, self.large_fit)

    def classical_time(self, grid: float) -> cperf.StepBreakdown:
        return cperf.optimal_nodes(grid, self.hardware, self.n_min, self.n_max, self.literal)


def qubits_for_grid(grid: float) -> int:
    return max(1, math.ceil(math.log2(grid)))


def q_ratio(grid: float, models: PerformanceModels) -> CrossoverRow:
    n_q = qubits_for_grid(grid)
    t_quantum = models.quantum_time(n_q)
    best = models.classical_time(grid)
    return CrossoverRow(
        grid=grid,
        n_q=n_q,
        t_quantum=t_quantum,
        n_nodes_opt=best.n_nodes,
        t_classical=best.t_step,
        ratio=t_quantum / best.t_step,
    )


def overlay_row(record: TimingRecord, kind: TableKind, models: PerformanceModels) -> CrossoverRow:
    """Quantum time with the measured circuit class substituted for its fit."""
    n_q = record.n_q
    measured = record.runtime_seconds
    if kind == TableKind.small:
        t_ps, t_pl = measured, max(float(models.large_fit.seconds(n_q)), 0.0)
    else:
        t_ps, t_pl = max(float(models.small_fit.seconds(n_q)), 0.0), measured
    t_quantum = qperf.tq_from_circuit_times(n_q, models.params, t_ps, t_pl)
    best = models.classical_time(record.grid_size)
    return CrossoverRow(
        grid=record.grid_size,
        n_q=n_q,
        t_quantum=t_quantum,
        n_nodes_opt=best.n_nodes,
        t_classical=best.t_step,
        ratio=t_quantum / best.t_step,
        source=f"{kind.value}:run{record.run_no}",
    )


def sweep(
    grids: list[float],
    models: PerformanceModels,
    overlays: dict[TableKind, list[TimingRecord]] | None = None,
) -> list[CrossoverRow]:
    rows = [q_ratio(grid, models) for grid in grids]
    for kind, records in (overlays or {}).items():
        rows.extend(overlay_row(record, kind, models) for record in records)
    logger.info(f"Crossover sweep: {len(grids)} model rows, {len(rows) - len(grids)} overlay rows")
    return rows


def default_grids() -> list[float]:
    return [float(2**k) for k in range(16, 31, 2)]


def q5e7_report(
    hardware: HardwareSpec | None = None,
    backend: Backend = Backend.ibm,
    literal: bool = False,
    unit: UnitScale = UnitScale.seconds,
) -> dict:
    """Q_5E7 under both unit readings of the published circuit-time fits."""
    readings = {}
    for preset in UnitScale:
        row = q_ratio(Q5E7_GRID, PerformanceModels.published(preset, backend, hardware, literal))
        readings[preset.value] = {"t_quantum": row.t_quantum, "ratio": row.ratio}
    row = q_ratio(Q5E7_GRID, PerformanceModels.published(unit, backend, hardware, literal))
    return {
        "grid": Q5E7_GRID,
        "n_q": row.n_q,
        "n_nodes_opt": row.n_nodes_opt,
        "t_classical": row.t_classical,
        "t_quantum": row.t_quantum,
        "ratio": row.ratio,
        "unit_scale": unit.value,
        "backend": backend.value,
        "literal_formula": literal,
        "by_unit_scale": readings,
        "quantum_advantage": row.ratio <= 1.0,
        "upper_bound": True,
        "basis": "per time step; both solvers advance the same number of LBM steps",
    }
