from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, PrivateAttr, model_validator

from vqcfd_api.config import config
from vqcfd_api.errors import QubitLimitError

SEED_FIELD = Field(default=0, ge=0, lt=2**64)


class AnsatzConfig(BaseModel):
    """Layered Ry circuit with alternating CZ layers; ``layers * n_q`` parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_q: PositiveInt
    layers: PositiveInt = 2
    max_qubits: PositiveInt = config.MAX_QUBITS

    @model_validator(mode="after")
    def check_qubit_limit(self):
        if self.n_q > self.max_qubits:
            raise QubitLimitError(
                f"{self.n_q} qubits requested but statevectors are capped at {self.max_qubits} "
                f"({2**self.max_qubits} amplitudes); raise MAX_QUBITS to go further"
            )
        return self

    @property
    def n_params(self) -> int:
        return self.layers * self.n_q

    @property
    def dim(self) -> int:
        return 2**self.n_q


class ShotModel(BaseModel):
    """Shot budget plus the seeded noise stream it owns."""

    model_config = ConfigDict(extra="forbid")

    n_shots: PositiveInt = 10_000
    seed: int = SEED_FIELD
    _rng: np.random.Generator = PrivateAttr()

    def model_post_init(self, __context) -> None:
        self._rng = np.random.default_rng(self.seed)

    @property
    def rng(self) -> np.random.Generator:
        return self._rng


class SpsaConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    a: float = Field(default=0.2, gt=0.0)
    c: float = Field(default=0.01, gt=0.0)
    A: float = Field(default=100.0, ge=0.0)
    alpha: float = 0.602
    gamma: float = 0.101
    max_iters: PositiveInt = 1000
    seed: int = SEED_FIELD
    return_best: bool = True

    @model_validator(mode="after")
    def check_exponents(self):
        if not 0.0 < self.gamma < self.alpha <= 1.0:
            raise ValueError(f"need 0 < gamma < alpha <= 1, got gamma={self.gamma}, alpha={self.alpha}")
        return self


class TrainBudget(BaseModel):
    """Gradient-based training budget (L-BFGS-B with exact gradients)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    maxiter: PositiveInt = 500
    restarts: PositiveInt = 4
    seed: int = SEED_FIELD
    gtol: float = Field(default=1e-12, gt=0.0)


class StepMode(str, Enum):
    algebraic = "algebraic"
    variational = "variational"


class InitMode(str, Enum):
    warm = "warm"
    cold = "cold"


class EngineConfig(BaseModel):
    """Per-step optimisation settings of the variational time-stepper."""

    model_config = ConfigDict(extra="forbid")

    layers: PositiveInt = 8
    mode: StepMode = StepMode.variational
    init: InitMode = InitMode.warm
    max_iters: PositiveInt = 1000
    # None keeps the multi-products exact
    n_shots: Optional[PositiveInt] = None
    seed: int = SEED_FIELD
    # None means calibrated from the first gradient estimates
    a: Optional[float] = Field(default=None, gt=0.0)
    # None means 0.01 noiseless, 0.1 under shot noise
    c: Optional[float] = Field(default=None, gt=0.0)
    alpha: float = 0.602
    gamma: float = 0.101
    calibration_samples: PositiveInt = 4
    oracle_factor: PositiveInt = 20
    oracle_restarts: PositiveInt = 8
    workers: PositiveInt = 1

    @property
    def stability_offset(self) -> float:
        return 0.1 * self.max_iters

    @property
    def perturbation(self) -> float:
        if self.c is not None:
            return self.c
        return 0.1 if self.n_shots else 0.01
