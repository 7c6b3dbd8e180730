"""Variational time-stepper.

Each of the nine D2Q9 populations is carried as an ansatz state plus a scale. One
time step builds the classical one-step target of every population from the decoded
fields, then either stores it verbatim (algebraic mode) or minimises the distance
between the scaled ansatz state and the target with SPSA (variational mode).

The cost is ``C = scale^2 - 2 scale MP(s, t) + |t|^2 = |scale s - t|^2`` where ``MP``
is the two-vector multi-product. At the optimal scale ``scale = MP`` it reduces to the
profiled cost ``|t|^2 - MP^2``, which is what SPSA minimises.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from vqcfd_api import lbm
from vqcfd_api.models.lbm import SimulationConfig
from vqcfd_api.models.quantum import (
    AnsatzConfig,
    EngineConfig,
    InitMode,
    ShotModel,
    SpsaConfig,
    StepMode,
    TrainBudget,
)
from vqcfd_api.quantum import build_states, estimate_multiproduct, multiproduct, train_pqc
from vqcfd_api.spsa import perturbation, spsa_minimize

logger = logging.getLogger(__name__)

# round-off floor for the gap denominator, relative to |t|^2
GAP_FLOOR = 1e-14


@dataclass(frozen=True)
class VariationalField:
    """Nine populations stored as ``(theta_v, scale_v)`` pairs.

    ``exact`` holds the padded target vectors verbatim when a step was taken
    algebraically (or for the exactly encoded initial condition); decoding then
    reads them instead of the ansatz.
    """

    ansatz: AnsatzConfig
    shape: tuple[int, int]
    thetas: np.ndarray
    scales: np.ndarray
    exact: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.thetas.shape != (lbm.N_V, self.ansatz.n_params):
            raise ValueError(f"expected thetas of shape (9, {self.ansatz.n_params}), got {self.thetas.shape}")
        if self.scales.shape != (lbm.N_V,):
            raise ValueError(f"expected 9 scales, got shape {self.scales.shape}")

    @property
    def n_grid(self) -> int:
        return self.shape[0] * self.shape[1]

    @property
    def parameter_count(self) -> int:
        return self.thetas.size + self.scales.size

    def vectors(self) -> np.ndarray:
        if self.exact is not None:
            return self.exact
        return self.scales[:, None] * build_states(self.thetas, self.ansatz)

    def decode(self) -> np.ndarray:
        """Populations of shape ``(9, ny, nx)``; padding amplitudes are dropped."""
        return self.vectors()[:, : self.n_grid].reshape((lbm.N_V,) + self.shape)


@dataclass
class ConvergenceTrace:
    step: int
    variable: int
    exact_min: float
    initial_cost: float
    final_cost: float
    costs: list[float] = field(default_factory=list)
    evaluations: int = 0
    calibration_evaluations: int = 0
    norm_sq: float = 0.0

    @property
    def gap(self) -> float:
        """``(C_final - C_min) / (C_0 - C_min)``; 0 when the start is already at the minimum."""
        denominator = self.initial_cost - self.exact_min
        if denominator <= GAP_FLOOR * self.norm_sq:
            return 0.0
        return (self.final_cost - self.exact_min) / denominator


@dataclass(frozen=True)
class VariableUpdate:
    theta: np.ndarray
    scale: float
    trace: ConvergenceTrace


def qubits_for(n_grid: int) -> int:
    if n_grid < 2:
        raise ValueError(f"a field needs at least two grid points, got {n_grid}")
    return (n_grid - 1).bit_length()


def ansatz_for(shape: tuple[int, int], layers: int) -> AnsatzConfig:
    return AnsatzConfig(n_q=qubits_for(shape[0] * shape[1]), layers=layers)


def pad_vectors(fields: np.ndarray, dim: int) -> np.ndarray:
    flat = fields.reshape(fields.shape[0], -1)
    padded = np.zeros((flat.shape[0], dim))
    padded[:, : flat.shape[1]] = flat
    return padded


def variable_seed(seed: int, v: int, step: int) -> int:
    return int(np.random.SeedSequence([seed ^ v, step]).generate_state(1, dtype=np.uint64)[0])


def build_targets(current: np.ndarray, sim: SimulationConfig, dim: int) -> np.ndarray:
    """Post-collide-stream-boundary populations of all nine variables, padded to ``dim``."""
    state = lbm.LatticeState(f=np.asarray(current, dtype=np.float64), tau=sim.tau)
    advanced = lbm.step(state, sim.boundary, sim.u_wall)
    return pad_vectors(advanced.f, dim)


def build_target(v: int, current: np.ndarray, sim: SimulationConfig, dim: int | None = None) -> np.ndarray:
    n_grid = current.shape[1] * current.shape[2]
    dim = 2 ** qubits_for(n_grid) if dim is None else dim
    return build_targets(current, sim, dim)[v]


def _overlap(theta: np.ndarray, target: np.ndarray, ansatz: AnsatzConfig, noise: ShotModel | None) -> float:
    exact = multiproduct([build_states(theta, ansatz)[0], target])
    if noise is None:
        return exact
    return estimate_multiproduct(exact, np.linalg.norm(target), noise)


def cost(
    theta: np.ndarray,
    scale: float,
    target: np.ndarray,
    ansatz: AnsatzConfig,
    noise: ShotModel | None = None,
) -> float:
    target = np.asarray(target, dtype=np.float64)
    mp = _overlap(np.asarray(theta, dtype=np.float64), target, ansatz, noise)
    return scale * scale - 2.0 * scale * mp + float(target @ target)


def profiled_cost(
    theta: np.ndarray,
    target: np.ndarray,
    ansatz: AnsatzConfig,
    noise: ShotModel | None = None,
) -> float:
    target = np.asarray(target, dtype=np.float64)
    mp = _overlap(np.asarray(theta, dtype=np.float64), target, ansatz, noise)
    return float(target @ target) - mp * mp


def optimal_scale(theta: np.ndarray, target: np.ndarray, ansatz: AnsatzConfig) -> float:
    return multiproduct([build_states(theta, ansatz)[0], target])


def exact_min_cost(
    target: np.ndarray,
    ansatz: AnsatzConfig,
    budget: TrainBudget | None = None,
    theta0: np.ndarray | None = None,
) -> float:
    """``|t|^2 (1 - F*)`` with ``F*`` from a heavyweight ``train_pqc`` run.

    The profiled cost only sees ``MP^2``, so the oracle aligns the target with the sign
    of the overlap at ``theta0`` before maximising it.
    """
    target = np.asarray(target, dtype=np.float64)
    norm_sq = float(target @ target)
    if norm_sq == 0.0:
        return 0.0
    if theta0 is not None and optimal_scale(theta0, target, ansatz) < 0.0:
        target = -target
    fit = train_pqc(target, ansatz, budget or TrainBudget(), theta0=theta0)
    return max(norm_sq * (1.0 - fit.fidelity), 0.0)


def oracle_budget(engine: EngineConfig, seed: int) -> TrainBudget:
    return TrainBudget(maxiter=engine.oracle_factor * engine.max_iters, restarts=engine.oracle_restarts, seed=seed)


def calibrate_gains(objective, theta0: np.ndarray, engine: EngineConfig, norm_sq: float, seed: int) -> tuple[SpsaConfig, int]:
    """Pick the SPSA step gain so the first update moves about 0.1 rad.

    The gain is capped by ``2 / (P |t|^2)`` at the first iteration, a bound on the
    curvature of the profiled cost along a Rademacher direction.
    """
    A, c = engine.stability_offset, engine.perturbation
    P = theta0.size
    cap = (A + 1.0) ** engine.alpha * 2.0 / (P * norm_sq)
    evaluations = 0
    if engine.a is not None:
        a = engine.a
    else:
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0xCA1]))
        magnitudes = []
        for _ in range(engine.calibration_samples):
            delta = perturbation(rng, P)
            diff = objective(theta0 + c * delta) - objective(theta0 - c * delta)
            evaluations += 2
            magnitudes.append(abs(diff) / (2.0 * c))
        mean_abs = float(np.mean(magnitudes))
        a = 0.1 * (A + 1.0) ** engine.alpha / mean_abs if mean_abs > 0.0 else cap
        a = min(a, cap)
    spsa_cfg = SpsaConfig(
        a=a,
        c=c,
        A=A,
        alpha=engine.alpha,
        gamma=engine.gamma,
        max_iters=engine.max_iters,
        seed=seed,
        # under shot noise the best-seen point is biased towards lucky draws
        return_best=engine.n_shots is None,
    )
    return spsa_cfg, evaluations


def optimize_variable(
    v: int,
    target: np.ndarray,
    theta0: np.ndarray,
    ansatz: AnsatzConfig,
    engine: EngineConfig,
    step: int,
) -> VariableUpdate:
    norm_sq = float(target @ target)
    if norm_sq == 0.0:
        trace = ConvergenceTrace(step=step, variable=v, exact_min=0.0, initial_cost=0.0, final_cost=0.0)
        return VariableUpdate(theta=theta0.copy(), scale=0.0, trace=trace)

    seed = variable_seed(engine.seed, v, step)
    shots = ShotModel(n_shots=engine.n_shots, seed=seed) if engine.n_shots else None

    def objective(theta):
        return profiled_cost(theta, target, ansatz, shots)

    spsa_cfg, calibration = calibrate_gains(objective, theta0, engine, norm_sq, seed)
    initial = profiled_cost(theta0, target, ansatz)
    result = spsa_minimize(objective, theta0, spsa_cfg)
    final = profiled_cost(result.theta, target, ansatz)
    c_min = exact_min_cost(target, ansatz, oracle_budget(engine, seed), theta0=result.theta)

    trace = ConvergenceTrace(
        step=step,
        variable=v,
        exact_min=c_min,
        initial_cost=initial,
        final_cost=final,
        costs=result.trace,
        evaluations=result.evaluations,
        calibration_evaluations=calibration,
        norm_sq=norm_sq,
    )
    logger.debug(
        f"step {step} v={v}: C0={initial:.4e} C_final={final:.4e} C_min={c_min:.4e} gap={trace.gap:.4f} a={spsa_cfg.a:.4g}"
    )
    return VariableUpdate(theta=result.theta, scale=optimal_scale(result.theta, target, ansatz), trace=trace)


def _algebraic_step(field: VariationalField, targets: np.ndarray, engine: EngineConfig, step: int):
    budget = TrainBudget(maxiter=50, restarts=1, seed=engine.seed)
    thetas, scales, traces = field.thetas.copy(), np.zeros(lbm.N_V), []
    for v in range(lbm.N_V):
        evaluations = 0
        norm = float(np.linalg.norm(targets[v]))
        if norm > 0.0:
            fit = train_pqc(targets[v], field.ansatz, budget, theta0=field.thetas[v])
            thetas[v], scales[v], evaluations = fit.theta, fit.overlap * norm, fit.evaluations
        traces.append(
            ConvergenceTrace(
                step=step,
                variable=v,
                exact_min=0.0,
                initial_cost=0.0,
                final_cost=0.0,
                evaluations=evaluations,
                norm_sq=norm * norm,
            )
        )
    return replace(field, thetas=thetas, scales=scales, exact=targets), traces


def _variational_step(field: VariationalField, targets: np.ndarray, engine: EngineConfig, step: int):
    def run(v: int) -> VariableUpdate:
        theta0 = field.thetas[v] if engine.init == InitMode.warm else np.zeros(field.ansatz.n_params)
        return optimize_variable(v, targets[v], theta0, field.ansatz, engine, step)

    if engine.workers > 1:
        with ThreadPoolExecutor(max_workers=engine.workers) as pool:
            updates = list(pool.map(run, range(lbm.N_V)))
    else:
        updates = [run(v) for v in range(lbm.N_V)]

    new_field = replace(
        field,
        thetas=np.vstack([u.theta for u in updates]),
        scales=np.array([u.scale for u in updates]),
        exact=None,
    )
    return new_field, [u.trace for u in updates]


def vqcfd_step(
    field: VariationalField,
    sim: SimulationConfig,
    engine: EngineConfig,
    step: int = 1,
) -> tuple[VariationalField, list[ConvergenceTrace]]:
    targets = build_targets(field.decode(), sim, field.ansatz.dim)
    if engine.mode == StepMode.algebraic:
        return _algebraic_step(field, targets, engine, step)
    return _variational_step(field, targets, engine, step)


def encode_fields(fields: np.ndarray, ansatz: AnsatzConfig, budget: TrainBudget) -> tuple[np.ndarray, np.ndarray]:
    vectors = pad_vectors(fields, ansatz.dim)
    thetas, scales = np.zeros((lbm.N_V, ansatz.n_params)), np.zeros(lbm.N_V)
    for v in range(lbm.N_V):
        norm = float(np.linalg.norm(vectors[v]))
        if norm == 0.0:
            continue
        fit = train_pqc(vectors[v], ansatz, budget)
        thetas[v], scales[v] = fit.theta, fit.overlap * norm
    return thetas, scales


def initial_field(sim: SimulationConfig, engine: EngineConfig) -> VariationalField:
    """Initial condition encoded exactly, with ansatz parameters to warm-start from."""
    state = lbm.initial_state(sim)
    shape = (sim.ny, sim.nx)
    ansatz = ansatz_for(shape, engine.layers)
    vectors = pad_vectors(state.f, ansatz.dim)
    if engine.init == InitMode.warm:
        thetas, scales = encode_fields(state.f, ansatz, TrainBudget(seed=engine.seed))
    else:
        thetas, scales = np.zeros((lbm.N_V, ansatz.n_params)), vectors[:, 0].copy()
    return VariationalField(ansatz=ansatz, shape=shape, thetas=thetas, scales=scales, exact=vectors)
