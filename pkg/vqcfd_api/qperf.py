"""Quantum runtime model: circuit-time tables, their regressions and t_q per time step.

t_q = N_v * N_i * N_f * N_shot * (N_ps * t_ps + N_pl * t_pl), with N_i = iter_slope * N_q.
"""
import csv
import io
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError
from scipy import stats

from vqcfd_api.config import config
from vqcfd_api.errors import FitError, SchemaError
from vqcfd_api.models.perf import (
    TIMING_COLUMNS,
    Backend,
    CircuitTimeFit,
    FitKind,
    QuantumCostParams,
    TableKind,
    TimingRecord,
    UnitScale,
)

logger = logging.getLogger(__name__)

# relative tolerance of the tabulated grid sizes against 2**n_q (three significant digits)
GRID_TOLERANCE = 0.01

TABLE_FILES = {TableKind.small: "table1_small.csv", TableKind.large: "table2_large.csv"}

# printed coefficients, in whatever unit the UnitScale preset says
PUBLISHED_SMALL = (0.0006784, 0.00017502)
PUBLISHED_LARGE = (0.00181582, 0.01748484, 0.01597166)
IONQ_C0 = 9.66e-3
IONQ_C0_CI95 = (9.36e-3, 9.96e-3)


def bundled_table(kind: TableKind | str) -> Path:
    return config.tables_dir / TABLE_FILES[TableKind(kind)]


def load_records(source: Path | str) -> list[TimingRecord]:
    """Parse a timing table from a path or from CSV text; errors name the 1-based data row."""
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
        label = str(source)
    else:
        text, label = source, "<text>"

    if not text.strip():
        logger.warning(f"Timing table {label} is empty")
        return []

    reader = csv.DictReader(io.StringIO(text))
    header = tuple(name.strip() for name in reader.fieldnames or ())
    if header != TIMING_COLUMNS:
        raise SchemaError(f"{label}: expected columns {','.join(TIMING_COLUMNS)}, got {','.join(header)}", row=0)

    records = []
    for row_no, row in enumerate(reader, start=1):
        if None in row or any(value is None for value in row.values()):
            raise SchemaError(f"{label}: row {row_no} has the wrong number of fields", row=row_no)
        try:
            record = TimingRecord(**{key.strip(): value.strip() for key, value in row.items()})
        except ValidationError as e:
            err = e.errors()[0]
            field = ".".join(str(part) for part in err["loc"])
            raise SchemaError(f"{label}: row {row_no}: {field}: {err['msg']}", row=row_no) from e
        expected = 2.0**record.n_q
        if abs(record.grid_size - expected) > GRID_TOLERANCE * expected:
            raise SchemaError(
                f"{label}: row {row_no}: grid_size {record.grid_size:g} does not match 2**{record.n_q}", row=row_no
            )
        records.append(record)

    if not records:
        logger.warning(f"Timing table {label} has a header but no rows")
    logger.debug(f"Loaded {len(records)} timing records from {label}")
    return records


def _xy(records: list[TimingRecord]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([r.n_q for r in records], dtype=np.float64)
    y = np.array([r.runtime_e4s for r in records], dtype=np.float64)
    return x, y


def _least_squares(kind: FitKind, design: np.ndarray, y: np.ndarray, intercept: bool) -> CircuitTimeFit:
    n, p = design.shape
    coefficients, *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ coefficients
    ss_res = float(residuals @ residuals)
    if intercept:
        ss_tot = float(((y - y.mean()) ** 2).sum())
    else:
        ss_tot = float(y @ y)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 0.0
    dof = n - p
    # predictors exclude the intercept column
    k = p - 1 if intercept else p
    adjusted = 1.0 - (1.0 - r2) * (n - 1) / (n - k - 1) if n - k - 1 > 0 else None

    sigma2 = ss_res / dof
    covariance = sigma2 * np.linalg.inv(design.T @ design)
    half_width = stats.t.ppf(0.975, dof) * np.sqrt(np.diag(covariance))
    ci95 = tuple((float(c - h), float(c + h)) for c, h in zip(coefficients, half_width))

    return CircuitTimeFit(
        kind=kind,
        coefficients=tuple(float(c) for c in coefficients),
        r2=r2,
        adjusted_r2=adjusted,
        ci95=ci95,
        unit_scale=UnitScale.table_units.factor,
        n=n,
        source="refit",
    )


def fit_linear(records: list[TimingRecord]) -> CircuitTimeFit:
    """Ordinary least squares ``runtime ~ c0 + c1 N_q`` in table units."""
    if len(records) < 3:
        raise FitError(f"a linear fit needs at least 3 records, got {len(records)}")
    x, y = _xy(records)
    if np.ptp(x) == 0.0:
        raise FitError(f"degenerate regressor: every record has n_q = {x[0]:g}")
    design = np.column_stack((np.ones_like(x), x))
    return _least_squares(FitKind.linear, design, y, intercept=True)


def fit_quadratic(records: list[TimingRecord]) -> CircuitTimeFit:
    if len(records) < 4:
        raise FitError(f"a quadratic fit needs at least 4 records, got {len(records)}")
    x, y = _xy(records)
    design = np.column_stack((np.ones_like(x), x, x * x))
    if np.linalg.matrix_rank(design) < 3:
        raise FitError("rank-deficient design: fewer than 3 distinct n_q values")
    return _least_squares(FitKind.quadratic, design, y, intercept=True)


def fit_proportional(records: list[TimingRecord]) -> CircuitTimeFit:
    """``runtime ~ c0 N_q`` through the origin."""
    if len(records) < 2:
        raise FitError(f"a proportional fit needs at least 2 records, got {len(records)}")
    x, y = _xy(records)
    if not x.any():
        raise FitError("degenerate regressor: every record has n_q = 0")
    return _least_squares(FitKind.proportional, x[:, None], y, intercept=False)


def published_small_fit(unit: UnitScale = UnitScale.seconds) -> CircuitTimeFit:
    return CircuitTimeFit(kind=FitKind.linear, coefficients=PUBLISHED_SMALL, adjusted_r2=0.55, unit_scale=unit.factor)


def published_large_fit(unit: UnitScale = UnitScale.seconds) -> CircuitTimeFit:
    return CircuitTimeFit(kind=FitKind.quadratic, coefficients=PUBLISHED_LARGE, adjusted_r2=0.86, unit_scale=unit.factor)


def ionq_small_fit() -> CircuitTimeFit:
    # stated in seconds, independent of the unit preset
    return CircuitTimeFit(
        kind=FitKind.proportional,
        coefficients=(IONQ_C0,),
        ci95=(IONQ_C0_CI95,),
        unit_scale=1.0,
    )


def published_fits(unit: UnitScale = UnitScale.seconds, backend: Backend = Backend.ibm) -> tuple[CircuitTimeFit, CircuitTimeFit]:
    small = ionq_small_fit() if backend == Backend.ionq else published_small_fit(unit)
    return small, published_large_fit(unit)


def ionq_small_time(n_q: int) -> float:
    if n_q <= 0:
        logger.warning(f"ionq_small_time called with n_q={n_q}; returning 0")
        return 0.0
    return IONQ_C0 * n_q


def _clamped(value: float, label: str, n_q: int) -> float:
    if value < 0.0:
        logger.warning(f"{label} circuit time is negative ({value:.3e} s) at n_q={n_q}; clamping to 0")
        return 0.0
    return value


def tq_from_circuit_times(n_q: int, params: QuantumCostParams, t_ps: float, t_pl: float) -> float:
    return params.n_v * params.mean_iterations(n_q) * params.n_f * params.n_shot * (params.n_ps * t_ps + params.n_pl * t_pl)


def tq_per_step(
    n_q: int,
    params: QuantumCostParams | None = None,
    small_fit: CircuitTimeFit | None = None,
    large_fit: CircuitTimeFit | None = None,
) -> float:
    """Quantum time per LBM step in seconds; published IBM coefficients read in seconds by default."""
    params = params or QuantumCostParams()
    small_fit = small_fit or published_small_fit()
    large_fit = large_fit or published_large_fit()
    t_ps = _clamped(float(small_fit.seconds(n_q)), "small", n_q)
    t_pl = _clamped(float(large_fit.seconds(n_q)), "large", n_q)
    return tq_from_circuit_times(n_q, params, t_ps, t_pl)


def tq_full_sum(iterations, n_f: int, n_shot, circuit_times) -> float:
    """Sum over variables v and circuits p of ``N_i,v * N_f * N_shot,p * t_p,v``.

    ``iterations`` has one entry per variable, ``circuit_times`` has shape
    ``(n_variables, n_circuits)`` and ``n_shot`` is a scalar or one value per circuit.
    """
    iterations = np.asarray(iterations, dtype=np.float64)
    circuit_times = np.asarray(circuit_times, dtype=np.float64)
    if circuit_times.ndim != 2 or circuit_times.shape[0] != iterations.size:
        raise ValueError(f"circuit_times must have shape ({iterations.size}, n_circuits), got {circuit_times.shape}")
    shots = np.broadcast_to(np.asarray(n_shot, dtype=np.float64), circuit_times.shape[1:])
    return float(np.sum(iterations * n_f * (circuit_times @ shots)))


def mean_circuit_times(n_q: int, params: QuantumCostParams, small_fit: CircuitTimeFit, large_fit: CircuitTimeFit) -> np.ndarray:
    """Per-variable, per-circuit times with every entry at its class mean; input to ``tq_full_sum``."""
    t_ps = _clamped(float(small_fit.seconds(n_q)), "small", n_q)
    t_pl = _clamped(float(large_fit.seconds(n_q)), "large", n_q)
    row = np.concatenate((np.full(params.n_ps, t_ps), np.full(params.n_pl, t_pl)))
    return np.tile(row, (params.n_v, 1))


def refit_table(kind: TableKind | str, records: list[TimingRecord] | None = None) -> CircuitTimeFit:
    kind = TableKind(kind)
    records = load_records(bundled_table(kind)) if records is None else records
    return fit_linear(records) if kind == TableKind.small else fit_quadratic(records)
