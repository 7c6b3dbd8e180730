try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, model_validator

from vqcfd_api.config import config
from vqcfd_api.errors import ConfigurationError
from vqcfd_api.models.lbm import InitialCondition, InitialKind, SimulationConfig
from vqcfd_api.models.perf import Backend, UnitScale
from vqcfd_api.models.quantum import EngineConfig

# verification runs stay at desk scale
MAX_VERIFY_QUBITS = 6


class TablesConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    small: Path = config.tables_dir / "table1_small.csv"
    large: Path = config.tables_dir / "table2_large.csv"


class VerifyConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    simulation: SimulationConfig = SimulationConfig(
        nx=4,
        ny=4,
        tau=0.8,
        initial=InitialCondition(kind=InitialKind.shear_wave),
        steps=3,
        snapshot_every=1,
    )
    engine: EngineConfig = EngineConfig()
    # None means 0.05 without shot noise and 0.15 with it
    gap_tolerance: Optional[PositiveFloat] = None

    @model_validator(mode="after")
    def check_desk_scale(self):
        n_grid = self.simulation.nx * self.simulation.ny
        if n_grid < 2 or (n_grid - 1).bit_length() > MAX_VERIFY_QUBITS:
            raise ConfigurationError(
                f"verification grids need 2 to {2**MAX_VERIFY_QUBITS} points, got {self.simulation.nx}x{self.simulation.ny}"
            )
        return self

    @property
    def tolerance(self) -> float:
        if self.gap_tolerance is not None:
            return self.gap_tolerance
        return 0.15 if self.engine.n_shots else 0.05


class PqcOptimizer(str, Enum):
    lbfgs = "lbfgs"
    spsa = "spsa"


class PqcRun(BaseModel):
    """Encode a vector and read it back; ``target`` defaults to a smooth Gaussian bump."""

    model_config = ConfigDict(extra="forbid")

    target: Optional[list[float]] = None
    size: PositiveInt = 16
    layers: PositiveInt = 8
    optimizer: PqcOptimizer = PqcOptimizer.lbfgs
    maxiter: PositiveInt = 500
    restarts: PositiveInt = 4


class SweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grids: list[PositiveFloat] = Field(default_factory=lambda: [float(2**k) for k in range(16, 31, 2)])
    n_min: PositiveInt = 1
    n_max: Optional[PositiveInt] = None
    # grid of the per-node-count curve
    curve_grid: PositiveFloat = 1e7
    overlays: bool = True


class AppConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=config.DEFAULT_SEED, ge=0, lt=2**64)
    unit_scale: UnitScale = UnitScale.seconds
    backend: Backend = Backend.ibm
    hardware: Path = config.hardware_dir / "frontier.toml"
    output_dir: Path = Path(config.OUTPUT_DIR)
    literal_formula: bool = False
    tables: TablesConfig = TablesConfig()
    lbm: SimulationConfig = SimulationConfig()
    vqcfd: VerifyConfig = VerifyConfig()
    pqc: PqcRun = PqcRun()
    sweep: SweepConfig = SweepConfig()


def load_app_config(path: Path | None = None, overrides: dict | None = None) -> AppConfig:
    """TOML file (if any) with ``overrides`` merged on top; unknown keys are rejected."""
    data: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError as e:
            raise ConfigurationError(f"config file {path} not found") from e
        except tomllib.TOMLDecodeError as e:
            raise ConfigurationError(f"config file {path} is not valid TOML: {e}") from e
    return validate_section(AppConfig, _merge(data, overrides or {}))


def validate_section(model: type[BaseModel], data: dict, section: str = "") -> BaseModel:
    """Validate ``data`` as ``model``, reporting problems as a ``ConfigurationError``."""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        prefix = f"{section}." if section else ""
        problems = "; ".join(f"{prefix}{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        raise ConfigurationError(f"invalid configuration: {problems}") from e


def _merge(base: dict, overrides: dict) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged
