"""Classical LBM runtime model for a GPU cluster.

Collision follows the roofline, max(bytes / bandwidth, flops / peak), per kernel.
Streaming costs as much as its slowest transfer: the HBM copy, the GPU-to-GPU
halo or the inter-node halo. Latencies are taken as zero.

The default collision estimate runs the kernels in cohorts of as many threads as
the GPU keeps in flight at once. ``literal=True`` instead multiplies the number of
cohorts by the full per-GPU thread count, which double counts but matches the
closed form it is compared against.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from vqcfd_api.errors import CapacityError, ConfigurationError
from vqcfd_api.models.hardware import ClusterSpec, GpuSpec, HardwareSpec, KernelProfile

logger = logging.getLogger(__name__)

# kernels 3 and 4 run once per lattice direction
PER_DIRECTION_KERNELS = (3, 4)


@dataclass(frozen=True)
class DecompositionState:
    grid: float
    n_nodes: int
    gpus_per_node: int = 8

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ConfigurationError(f"need at least one node, got {self.n_nodes}")
        if self.threads_per_gpu < 1.0:
            raise ConfigurationError(
                f"grid of {self.grid:g} points spread over {self.n_gpus} GPUs leaves less than one point per GPU"
            )

    @property
    def n_gpus(self) -> int:
        return self.n_nodes * self.gpus_per_node

    @property
    def threads_per_gpu(self) -> float:
        return self.grid / self.n_gpus

    @property
    def boundary_points(self) -> float:
        # 2D: one side of a square sub-domain
        return math.sqrt(self.threads_per_gpu)

    def waves(self, concurrent: int) -> int:
        return math.ceil(self.threads_per_gpu / concurrent)


@dataclass(frozen=True)
class StepBreakdown:
    grid: float
    n_nodes: int
    t_collision: float
    t_streaming: float

    @property
    def t_step(self) -> float:
        return self.t_collision + self.t_streaming

    @property
    def mlups(self) -> float:
        return mlups(self.grid, self.t_step)


def _kernel_weights(n_v: int) -> np.ndarray:
    weights = np.ones(5)
    weights[list(PER_DIRECTION_KERNELS)] = n_v
    return weights


def _collision_times(threads, gpu: GpuSpec, kp: KernelProfile, n_v: int = 9, literal: bool = False) -> np.ndarray:
    threads = np.asarray(threads, dtype=np.float64)
    concurrent = gpu.concurrent_threads
    waves = np.ceil(threads / concurrent)
    cohort = threads if literal else np.minimum(threads, concurrent)
    memory = np.multiply.outer(cohort, np.asarray(kp.bytes_per_thread)) / gpu.bw_hbm
    compute = np.multiply.outer(cohort, np.asarray(kp.flops_per_thread)) / gpu.flop_max
    per_kernel = np.maximum(memory, compute)
    return waves * (per_kernel @ _kernel_weights(n_v))


def _streaming_times(threads, n_nodes, gpu: GpuSpec, cluster: ClusterSpec, n_v: int = 9, word: int = 8) -> np.ndarray:
    threads = np.asarray(threads, dtype=np.float64)
    n_nodes = np.asarray(n_nodes, dtype=np.float64)
    boundary = np.sqrt(threads)
    hbm = 2 * word * threads / gpu.bw_hbm
    intra = 7 * word * boundary / cluster.bw_gpu
    inter = n_nodes * word * boundary / cluster.bw_node
    return (n_v - 1) * np.maximum(np.maximum(hbm, intra), inter)


def collision_time(dec: DecompositionState, gpu: GpuSpec, kp: KernelProfile, n_v: int = 9, literal: bool = False) -> float:
    return float(_collision_times(dec.threads_per_gpu, gpu, kp, n_v, literal))


def streaming_time(dec: DecompositionState, gpu: GpuSpec, cluster: ClusterSpec, n_v: int = 9) -> float:
    return float(_streaming_times(dec.threads_per_gpu, dec.n_nodes, gpu, cluster, n_v))


def check_capacity(grid: float, n_nodes: int, spec: HardwareSpec) -> None:
    per_gpu = grid * spec.bytes_per_point / (n_nodes * spec.cluster.gpus_per_node)
    if per_gpu > spec.gpu.hbm_capacity:
        raise CapacityError(
            f"grid {grid:g} on {n_nodes} nodes needs {per_gpu / 1e9:.1f} GB per GPU "
            f"but HBM holds {spec.gpu.hbm_capacity / 1e9:.1f} GB"
        )


def step_breakdown(grid: float, n_nodes: int, spec: HardwareSpec | None = None, literal: bool = False) -> StepBreakdown:
    spec = spec or HardwareSpec()
    if not 1 <= n_nodes <= spec.cluster.n_nodes_max:
        raise ConfigurationError(f"n_nodes must lie in [1, {spec.cluster.n_nodes_max}], got {n_nodes}")
    check_capacity(grid, n_nodes, spec)
    dec = DecompositionState(grid=grid, n_nodes=n_nodes, gpus_per_node=spec.cluster.gpus_per_node)
    return StepBreakdown(
        grid=grid,
        n_nodes=n_nodes,
        t_collision=collision_time(dec, spec.gpu, spec.kernels, spec.n_v, literal),
        t_streaming=streaming_time(dec, spec.gpu, spec.cluster, spec.n_v),
    )


def step_time(grid: float, n_nodes: int, spec: HardwareSpec | None = None, literal: bool = False) -> float:
    return step_breakdown(grid, n_nodes, spec, literal).t_step


def mlups(grid: float, t_step: float) -> float:
    if t_step <= 0.0:
        raise ValueError(f"step time must be positive, got {t_step}")
    return grid / (t_step * 1e6)


def feasible_nodes(grid: float, spec: HardwareSpec, n_min: int = 1, n_max: int | None = None) -> np.ndarray:
    """Node counts that leave at least one point per GPU and fit the state in HBM."""
    n_max = spec.cluster.n_nodes_max if n_max is None else n_max
    if not 1 <= n_min <= n_max <= spec.cluster.n_nodes_max:
        raise ConfigurationError(f"node range [{n_min}, {n_max}] outside [1, {spec.cluster.n_nodes_max}]")
    nodes = np.arange(n_min, n_max + 1)
    gpus = nodes * spec.cluster.gpus_per_node
    fits = (grid / gpus >= 1.0) & (grid * spec.bytes_per_point / gpus <= spec.gpu.hbm_capacity)
    return nodes[fits]


def node_curve(
    grid: float,
    spec: HardwareSpec | None = None,
    n_min: int = 1,
    n_max: int | None = None,
    literal: bool = False,
) -> list[StepBreakdown]:
    """Step time for every feasible node count in the range, in increasing node order."""
    spec = spec or HardwareSpec()
    nodes = feasible_nodes(grid, spec, n_min, n_max)
    threads = grid / (nodes * spec.cluster.gpus_per_node)
    collision = _collision_times(threads, spec.gpu, spec.kernels, spec.n_v, literal)
    streaming = _streaming_times(threads, nodes, spec.gpu, spec.cluster, spec.n_v)
    return [
        StepBreakdown(grid=grid, n_nodes=int(n), t_collision=float(c), t_streaming=float(s))
        for n, c, s in zip(nodes, collision, streaming)
    ]


def optimal_nodes(
    grid: float,
    spec: HardwareSpec | None = None,
    n_min: int = 1,
    n_max: int | None = None,
    literal: bool = False,
) -> StepBreakdown:
    """Exhaustive argmin of the step time over integer node counts; ties go to fewer nodes."""
    curve = node_curve(grid, spec, n_min, n_max, literal)
    if not curve:
        raise CapacityError(f"no node count in the range can hold a grid of {grid:g} points")
    times = np.array([b.t_step for b in curve])
    best = curve[int(np.argmin(times))]
    logger.debug(f"grid {grid:g}: optimal {best.n_nodes} nodes, t_step={best.t_step:.4e} s, {best.mlups:,.0f} MLUPS")
    return best
