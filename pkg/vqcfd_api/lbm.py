"""D2Q9 lattice-Boltzmann solver (BGK collision, pull streaming).

Population arrays have shape ``(9, ny, nx)``: row-major with x fastest.
"""
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from vqcfd_api.errors import DegenerateStateError, InstabilityError
from vqcfd_api.models.lbm import (
    BoundarySpec,
    EdgeCondition,
    EdgeKind,
    InitialKind,
    SimulationConfig,
)

logger = logging.getLogger(__name__)

#  6  2  5
#   \ | /
# 3 - 0 - 1
#   / | \
#  7  4  8


@dataclass(frozen=True)
class D2Q9Set:
    velocities: np.ndarray
    weights_exact: tuple[Fraction, ...]
    opposite: np.ndarray
    sound_speed_sq_exact: Fraction = Fraction(1, 3)
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", np.array([float(w) for w in self.weights_exact]))

    @property
    def sound_speed_sq(self) -> float:
        return float(self.sound_speed_sq_exact)

    @classmethod
    def standard(cls) -> "D2Q9Set":
        velocities = np.array(
            [[0, 0], [1, 0], [0, 1], [-1, 0], [0, -1], [1, 1], [-1, 1], [-1, -1], [1, -1]],
            dtype=np.int64,
        )
        weights = (Fraction(4, 9),) + (Fraction(1, 9),) * 4 + (Fraction(1, 36),) * 4
        opposite = np.array([0, 3, 4, 1, 2, 7, 8, 5, 6], dtype=np.int64)
        return cls(velocities=velocities, weights_exact=weights, opposite=opposite)


D2Q9 = D2Q9Set.standard()
EX = D2Q9.velocities[:, 0].astype(np.float64)
EY = D2Q9.velocities[:, 1].astype(np.float64)
W = D2Q9.weights
N_V = 9

# inward normals of each edge
_NORMALS = {"west": (1, 0), "east": (-1, 0), "south": (0, 1), "north": (0, -1)}
# edges meeting the first and last cell of each edge
_ENDS = {"west": ("south", "north"), "east": ("south", "north"), "south": ("west", "east"), "north": ("west", "east")}


@dataclass(frozen=True)
class LatticeState:
    f: np.ndarray
    tau: float

    def __post_init__(self):
        if self.f.ndim != 3 or self.f.shape[0] != N_V:
            raise ValueError(f"populations must have shape (9, ny, nx), got {self.f.shape}")

    @property
    def ny(self) -> int:
        return self.f.shape[1]

    @property
    def nx(self) -> int:
        return self.f.shape[2]

    @property
    def n_grid(self) -> int:
        return self.nx * self.ny

    def total_mass(self) -> float:
        return float(self.f.sum())


@dataclass(frozen=True)
class MacroFields:
    rho: np.ndarray
    ux: np.ndarray
    uy: np.ndarray


@dataclass(frozen=True)
class Snapshot:
    step: int
    fields: MacroFields


def viscosity(tau: float) -> float:
    return D2Q9.sound_speed_sq * (tau - 0.5)


def tau_for_reynolds(u: float, length: float, reynolds: float) -> float:
    return u * length / reynolds / D2Q9.sound_speed_sq + 0.5


def compute_macros(state: LatticeState) -> MacroFields:
    f = state.f
    rho = f.sum(axis=0)
    bad = np.argwhere(~(rho > 0.0))
    if bad.size:
        y, x = (int(i) for i in bad[0])
        raise DegenerateStateError(f"non-positive density {rho[y, x]!r} at cell (x={x}, y={y})", cell=(x, y))
    ux = np.tensordot(EX, f, axes=1) / rho
    uy = np.tensordot(EY, f, axes=1) / rho
    return MacroFields(rho=rho, ux=ux, uy=uy)


def equilibrium(rho, u) -> np.ndarray:
    """BGK equilibrium; ``rho`` and both components of ``u`` may be scalars or fields."""
    rho = np.asarray(rho, dtype=np.float64)
    ux = np.asarray(u[0], dtype=np.float64)
    uy = np.asarray(u[1], dtype=np.float64)
    extra = (1,) * max(rho.ndim, ux.ndim, uy.ndim)
    ex = EX.reshape((N_V,) + extra)
    ey = EY.reshape((N_V,) + extra)
    w = W.reshape((N_V,) + extra)
    cu = (ex * ux + ey * uy) / D2Q9.sound_speed_sq
    usq = (ux * ux + uy * uy) / D2Q9.sound_speed_sq
    return w * rho * (1.0 + cu + 0.5 * cu * cu - 0.5 * usq)


def collide(state: LatticeState) -> LatticeState:
    macros = compute_macros(state)
    feq = equilibrium(macros.rho, (macros.ux, macros.uy))
    f = state.f - (state.f - feq) / state.tau
    return replace(state, f=f)


def _edge_index(edge: str, ny: int, nx: int):
    match edge:
        case "west":
            return (slice(None), 0)
        case "east":
            return (slice(None), nx - 1)
        case "south":
            return (0, slice(None))
        case "north":
            return (ny - 1, slice(None))
    raise ValueError(f"unknown edge {edge!r}")


def _incoming(edge: str) -> list[int]:
    nx_, ny_ = _NORMALS[edge]
    return [v for v in range(N_V) if EX[v] * nx_ + EY[v] * ny_ == 1]


def _wall_velocity(edge: EdgeCondition, default: tuple[float, float]) -> tuple[float, float]:
    return edge.velocity if edge.velocity is not None else default


def stream(state: LatticeState, boundary: BoundarySpec, u_wall: tuple[float, float] = (0.0, 0.0)) -> LatticeState:
    """Shift every population one link along its velocity and bounce back at walls.

    ``state.f`` is read as the post-collision populations. Moving walls use half-way
    bounce-back with the momentum term ``2 w_v rho_w (e_v . u_wall) / c_s^2``.
    """
    post = state.f
    f = np.empty_like(post)
    f[0] = post[0]
    for v in range(1, N_V):
        f[v] = np.roll(post[v], shift=(int(EY[v]), int(EX[v])), axis=(0, 1))

    ny, nx = state.ny, state.nx
    for name, edge in boundary.edges().items():
        if edge.kind != EdgeKind.moving_wall:
            continue
        idx = _edge_index(name, ny, nx)
        uw = _wall_velocity(edge, u_wall)
        rho_w = post[(slice(None),) + idx].sum(axis=0)
        for v in _incoming(name):
            correction = 2.0 * W[v] * rho_w * (EX[v] * uw[0] + EY[v] * uw[1]) / D2Q9.sound_speed_sq
            f[(v,) + idx] = post[(D2Q9.opposite[v],) + idx] + correction
    return replace(state, f=f)


def _wall_owned(name: str, v: int, boundary: BoundarySpec, size: int) -> np.ndarray:
    """Cells of edge ``name`` where a wall on the adjoining edge already set direction ``v``."""
    owned = np.zeros(size, dtype=bool)
    edges = boundary.edges()
    for position, neighbour in zip((0, -1), _ENDS[name]):
        if edges[neighbour].kind == EdgeKind.moving_wall and v in _incoming(neighbour):
            owned[position] = True
    return owned


def apply_open_boundaries(state: LatticeState, boundary: BoundarySpec) -> LatticeState:
    """Zou-He closure for mass-inflow and pressure-outflow edges (post-stream).

    At corners shared with a wall the directions the bounce-back set are kept.
    """
    open_edges = {
        name: edge
        for name, edge in boundary.edges().items()
        if edge.kind in (EdgeKind.mass_inflow, EdgeKind.pressure_outflow)
    }
    if not open_edges:
        return state

    f = state.f.copy()
    ny, nx = state.ny, state.nx
    for name, edge in open_edges.items():
        n = np.array(_NORMALS[name], dtype=np.float64)
        idx = _edge_index(name, ny, nx)
        cells = f[(slice(None),) + idx]
        normal_dot = EX * n[0] + EY * n[1]
        tangential = [v for v in range(N_V) if normal_dot[v] == 0]
        outgoing = [v for v in range(N_V) if normal_dot[v] == -1]
        known = cells[tangential].sum(axis=0) + 2.0 * cells[outgoing].sum(axis=0)

        if edge.kind == EdgeKind.mass_inflow:
            u = np.array(edge.velocity if edge.velocity is not None else (0.0, 0.0), dtype=np.float64)
            u_n = float(u @ n)
            rho = known / (1.0 - u_n)
            ux, uy = np.full_like(rho, u[0]), np.full_like(rho, u[1])
        else:
            rho = np.full_like(known, edge.density)
            u_n = 1.0 - known / rho
            ux, uy = u_n * n[0], u_n * n[1]

        for v in _incoming(name):
            opp = D2Q9.opposite[v]
            t = np.array([EX[v], EY[v]]) - n
            if not t.any():
                closed = cells[opp] + (2.0 / 3.0) * rho * u_n
            else:
                u_t = ux * t[0] + uy * t[1]
                tangential_flux = sum(cells[j] * (EX[j] * t[0] + EY[j] * t[1]) for j in tangential)
                closed = cells[opp] + rho * u_n / 6.0 + 0.5 * rho * u_t - 0.5 * tangential_flux
            cells[v] = np.where(_wall_owned(name, v, boundary, cells.shape[1]), cells[v], closed)
        f[(slice(None),) + idx] = cells
    return replace(state, f=f)


def step(state: LatticeState, boundary: BoundarySpec, u_wall: tuple[float, float] = (0.0, 0.0)) -> LatticeState:
    return apply_open_boundaries(stream(collide(state), boundary, u_wall), boundary)


def initial_state(cfg: SimulationConfig) -> LatticeState:
    init = cfg.initial
    y, x = np.mgrid[0 : cfg.ny, 0 : cfg.nx].astype(np.float64)
    rho = np.full((cfg.ny, cfg.nx), init.rho0)
    ux = np.full_like(rho, init.velocity[0])
    uy = np.full_like(rho, init.velocity[1])
    match init.kind:
        case InitialKind.shear_wave:
            ux = ux + init.amplitude * np.sin(2.0 * np.pi * y / cfg.ny)
        case InitialKind.taylor_green:
            kx, ky = 2.0 * np.pi / cfg.nx, 2.0 * np.pi / cfg.ny
            ux = ux - init.amplitude * np.cos(kx * x) * np.sin(ky * y)
            uy = uy + init.amplitude * np.sin(kx * x) * np.cos(ky * y)
    return LatticeState(f=equilibrium(rho, (ux, uy)), tau=cfg.tau)


def run_simulation(cfg: SimulationConfig, state: LatticeState | None = None) -> list[Snapshot]:
    """Advance ``cfg.steps`` steps, keeping macroscopic snapshots every ``snapshot_every`` steps."""
    state = initial_state(cfg) if state is None else state
    logger.info(
        f"Running {cfg.nx}x{cfg.ny} lattice for {cfg.steps} steps (tau={cfg.tau}, nu={viscosity(cfg.tau):.5f})"
    )
    snapshots = [Snapshot(step=0, fields=compute_macros(state))]
    for n in range(1, cfg.steps + 1):
        try:
            state = step(state, cfg.boundary, cfg.u_wall)
        except DegenerateStateError as e:
            raise InstabilityError(f"lattice went unstable during step {n}: {e}", step=n) from e
        if not np.isfinite(state.f).all():
            raise InstabilityError(f"non-finite populations after step {n}", step=n)
        if not (state.f.sum(axis=0) > 0.0).all():
            raise InstabilityError(f"non-positive density after step {n}", step=n)
        if n % cfg.snapshot_every == 0 or n == cfg.steps:
            snapshots.append(Snapshot(step=n, fields=compute_macros(state)))
    logger.debug(f"Simulation finished with {len(snapshots)} snapshots")
    return snapshots
