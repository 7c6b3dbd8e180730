try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, field_validator

from vqcfd_api.errors import ConfigurationError


class GpuSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    flop_max: PositiveFloat = 23.9e12
    bw_hbm: PositiveFloat = 1.6e12
    hbm_capacity: PositiveFloat = 64e9
    n_cu: PositiveInt = 110
    n_simd: PositiveInt = 4
    wavefront: PositiveInt = 64

    @property
    def concurrent_threads(self) -> int:
        return self.wavefront * self.n_simd * self.n_cu


class ClusterSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n_nodes_max: PositiveInt = 9408
    gpus_per_node: PositiveInt = 8
    bw_gpu: PositiveFloat = 200e9
    bw_node: PositiveFloat = 3e9

    @property
    def total_gpus(self) -> int:
        return self.n_nodes_max * self.gpus_per_node


class KernelProfile(BaseModel):
    """Bytes moved per thread by each of the five collision kernels.

    Kernels 0-2 run once per step, kernels 3-4 once per lattice direction. FLOPs
    follow from the fixed arithmetic intensities.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    bytes_per_thread: tuple[float, float, float, float, float] = (80.0, 88.0, 88.0, 40.0, 16.0)
    arithmetic_intensity: tuple[float, float, float, float, float] = (0.1, 0.193, 0.193, 0.425, 0.0)

    @field_validator("bytes_per_thread", "arithmetic_intensity")
    @classmethod
    def non_negative(cls, value):
        if any(v < 0.0 for v in value):
            raise ValueError("kernel byte counts and intensities must be non-negative")
        return value

    @property
    def flops_per_thread(self) -> tuple[float, ...]:
        return tuple(b * ai for b, ai in zip(self.bytes_per_thread, self.arithmetic_intensity))


class HardwareSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = "frontier"
    gpu: GpuSpec = GpuSpec()
    cluster: ClusterSpec = ClusterSpec()
    kernels: KernelProfile = KernelProfile()
    n_v: PositiveInt = 9
    bytes_per_double: PositiveInt = 8
    # populations plus post-collision copy per grid point
    doubles_per_point: PositiveInt = Field(default=18)

    @property
    def bytes_per_point(self) -> int:
        return self.doubles_per_point * self.bytes_per_double

    def scaled(self, factor: float) -> "HardwareSpec":
        """Every bandwidth and the peak FLOP rate multiplied by ``factor``."""
        gpu = self.gpu.model_copy(update={"flop_max": self.gpu.flop_max * factor, "bw_hbm": self.gpu.bw_hbm * factor})
        cluster = self.cluster.model_copy(
            update={"bw_gpu": self.cluster.bw_gpu * factor, "bw_node": self.cluster.bw_node * factor}
        )
        return self.model_copy(update={"gpu": gpu, "cluster": cluster})

    @classmethod
    def from_toml(cls, path: Path) -> "HardwareSpec":
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError as e:
            raise ConfigurationError(f"hardware spec {path} not found") from e
        except tomllib.TOMLDecodeError as e:
            raise ConfigurationError(f"hardware spec {path} is not valid TOML: {e}") from e
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigurationError(f"hardware spec {path}: {e}") from e
