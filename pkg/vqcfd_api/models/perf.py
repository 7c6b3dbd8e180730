from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, model_validator


class UnitScale(str, Enum):
    """How the printed circuit-time coefficients are read."""

    seconds = "seconds"
    table_units = "table-units"

    @property
    def factor(self) -> float:
        return 1.0 if self is UnitScale.seconds else 1e-4


class Backend(str, Enum):
    ibm = "ibm"
    # proportional small-circuit model; large circuits still use the IBM fit
    ionq = "ionq"


class FitKind(str, Enum):
    linear = "linear"
    quadratic = "quadratic"
    proportional = "proportional"


class TableKind(str, Enum):
    small = "small"
    large = "large"


TIMING_COLUMNS = ("run_no", "grid_size", "n_q", "qubits_per_circuit", "backend", "circuit_depth", "runtime_e4s")


class TimingRecord(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    run_no: PositiveInt
    grid_size: PositiveFloat
    n_q: PositiveInt
    qubits_per_circuit: PositiveInt
    backend: str = Field(min_length=1)
    circuit_depth: PositiveInt
    # tabulated in units of 1e-4 s
    runtime_e4s: PositiveFloat

    @property
    def runtime_seconds(self) -> float:
        return self.runtime_e4s * 1e-4


class CircuitTimeFit(BaseModel):
    """Mean circuit time as a polynomial in N_q; ``seconds(n_q)`` applies ``unit_scale``."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: FitKind
    coefficients: tuple[float, ...]
    r2: Optional[float] = None
    adjusted_r2: Optional[float] = None
    ci95: Optional[tuple[tuple[float, float], ...]] = None
    unit_scale: PositiveFloat = 1.0
    n: int = 0
    source: str = "published"

    @model_validator(mode="after")
    def check_coefficient_count(self):
        expected = {FitKind.linear: 2, FitKind.quadratic: 3, FitKind.proportional: 1}[self.kind]
        if len(self.coefficients) != expected:
            raise ValueError(f"a {self.kind.value} fit has {expected} coefficients, got {len(self.coefficients)}")
        if self.ci95 is not None and len(self.ci95) != expected:
            raise ValueError("one confidence interval per coefficient")
        return self

    def evaluate(self, n_q):
        n_q = np.asarray(n_q, dtype=np.float64)
        if self.kind == FitKind.proportional:
            return self.coefficients[0] * n_q
        return np.polynomial.polynomial.polyval(n_q, self.coefficients)

    def seconds(self, n_q):
        return self.evaluate(n_q) * self.unit_scale


class QuantumCostParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n_v: PositiveInt = 9
    n_shot: PositiveInt = 10_000
    n_f: PositiveInt = 2
    n_ps: PositiveInt = 9
    n_pl: PositiveInt = 45
    # mean optimizer iterations per variable = iter_slope * N_q
    iter_slope: PositiveFloat = 125.0

    def mean_iterations(self, n_q) -> float:
        return self.iter_slope * n_q
