"""Statevector backend for amplitude-encoded CFD fields.

Qubit ``q`` is bit ``n_q - 1 - q`` of the amplitude index (qubit 0 most significant).
Parameters are laid out layer by layer: ``theta[l * n_q + q]`` drives Ry on qubit ``q`` in layer ``l``.
Each layer ends with CZ on pairs (0, 1), (2, 3), ... when ``l`` is even and (1, 2), (3, 4), ... when odd.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from vqcfd_api.errors import DimensionError
from vqcfd_api.models.quantum import AnsatzConfig, ShotModel, SpsaConfig, TrainBudget
from vqcfd_api.spsa import spsa_minimize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StateVector:
    n_q: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (2**self.n_q,):
            raise DimensionError(f"{self.n_q} qubits need {2**self.n_q} amplitudes, got {self.amplitudes.shape}")
        self.amplitudes.flags.writeable = False

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def real_part(self, atol: float = 1e-12) -> np.ndarray:
        if np.abs(self.amplitudes.imag).max(initial=0.0) > atol:
            raise DimensionError("state has complex amplitudes and cannot be decoded as a real field")
        return self.amplitudes.real.copy()


@dataclass(frozen=True)
class TrainResult:
    theta: np.ndarray
    fidelity: float
    overlap: float
    evaluations: int


@lru_cache(maxsize=None)
def _cz_layer_signs(n_q: int, offset: int) -> np.ndarray:
    """Diagonal of the CZ layer on pairs ``(offset, offset + 1), (offset + 2, offset + 3), ...``."""
    index = np.arange(2**n_q)
    bits = (index[:, None] >> (n_q - 1 - np.arange(n_q))) & 1
    first = np.arange(offset, n_q - 1, 2)
    parity = (bits[:, first] & bits[:, first + 1]).sum(axis=1)
    signs = np.where(parity % 2 == 1, -1.0, 1.0)
    signs.flags.writeable = False
    return signs


def build_states(thetas: np.ndarray, cfg: AnsatzConfig) -> np.ndarray:
    """Real amplitudes for a batch of parameter vectors, shape ``(batch, 2**n_q)``."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    if thetas.shape[1] != cfg.n_params:
        raise DimensionError(f"ansatz takes {cfg.n_params} parameters, got {thetas.shape[1]}")
    n, batch = cfg.n_q, thetas.shape[0]
    psi = np.zeros((batch, cfg.dim))
    psi[:, 0] = 1.0
    angles = thetas.reshape(batch, cfg.layers, n) / 2.0
    cos, sin = np.cos(angles), np.sin(angles)
    for layer in range(cfg.layers):
        for q in range(n):
            view = psi.reshape(batch, 2**q, 2, 2 ** (n - q - 1))
            c = cos[:, layer, q, None, None]
            s = sin[:, layer, q, None, None]
            a0, a1 = view[:, :, 0, :], view[:, :, 1, :]
            psi = np.stack((c * a0 - s * a1, s * a0 + c * a1), axis=2).reshape(batch, cfg.dim)
        psi = psi * _cz_layer_signs(n, layer % 2)
    return psi


def build_state(theta: np.ndarray, cfg: AnsatzConfig) -> StateVector:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (cfg.n_params,):
        raise DimensionError(f"ansatz takes {cfg.n_params} parameters, got shape {theta.shape}")
    return StateVector(n_q=cfg.n_q, amplitudes=build_states(theta, cfg)[0].astype(np.complex128))


def decode_field(state: StateVector, scale: float) -> np.ndarray:
    return scale * state.real_part()


def multiproduct(vectors) -> float:
    """Sum over i of the product over k of ``vectors[k][i]``."""
    arrays = [np.asarray(v, dtype=np.float64) for v in vectors]
    if len(arrays) < 2:
        raise DimensionError(f"a multi-product needs at least two vectors, got {len(arrays)}")
    lengths = {a.shape for a in arrays}
    if len(lengths) != 1 or arrays[0].ndim != 1 or arrays[0].size == 0:
        raise DimensionError(f"multi-product vectors must be non-empty and equal length, got shapes {sorted(lengths)}")
    return float(np.prod(np.vstack(arrays), axis=0).sum())


def estimate_multiproduct(exact: float, bound: float, shots: ShotModel) -> float:
    """Shot-noise emulation: Gaussian error with sigma = bound / sqrt(n_shots)."""
    sigma = abs(bound) / np.sqrt(shots.n_shots)
    return float(exact + shots.rng.normal(0.0, sigma))


def fidelity(amplitudes: np.ndarray, target: np.ndarray) -> float:
    target = np.asarray(target, dtype=np.float64)
    return float(np.dot(np.real(amplitudes), target / np.linalg.norm(target)) ** 2)


def _check_target(target: np.ndarray, cfg: AnsatzConfig) -> np.ndarray:
    target = np.asarray(target, dtype=np.float64)
    size = target.size
    if target.ndim != 1 or size < 2 or size & (size - 1):
        raise DimensionError(f"target length must be a power of two, got {target.shape}")
    if size != cfg.dim:
        raise DimensionError(f"target has {size} entries but {cfg.n_q} qubits encode {cfg.dim}")
    norm = np.linalg.norm(target)
    if norm == 0.0:
        raise DimensionError("cannot encode the zero vector")
    return target / norm


def overlap_and_gradient(theta: np.ndarray, unit_target: np.ndarray, cfg: AnsatzConfig) -> tuple[float, np.ndarray]:
    """Overlap <psi(theta), t> and its exact gradient, d psi / d theta_j = psi(theta + pi e_j) / 2."""
    shifted = theta[None, :] + np.pi * np.eye(cfg.n_params)
    states = build_states(np.vstack((theta[None, :], shifted)), cfg)
    overlaps = states @ unit_target
    return float(overlaps[0]), 0.5 * overlaps[1:]


def train_pqc(
    target: np.ndarray,
    cfg: AnsatzConfig,
    opt: TrainBudget | SpsaConfig | None = None,
    theta0: np.ndarray | None = None,
) -> TrainResult:
    """Fit ansatz parameters so the encoded state points along ``target``.

    The signed overlap is maximised, so ``decode_field(build_state(theta), norm(target))``
    recovers ``target`` itself rather than its negative.
    """
    unit = _check_target(target, cfg)
    opt = TrainBudget() if opt is None else opt
    start = np.zeros(cfg.n_params) if theta0 is None else np.asarray(theta0, dtype=np.float64)

    if isinstance(opt, SpsaConfig):
        result = spsa_minimize(lambda th: 1.0 - float(build_states(th, cfg)[0] @ unit), start, opt)
        psi = build_states(result.theta, cfg)[0]
        return TrainResult(
            theta=result.theta,
            fidelity=fidelity(psi, unit),
            overlap=float(psi @ unit),
            evaluations=result.evaluations,
        )

    rng = np.random.default_rng(opt.seed)
    evaluations = 0

    def objective(theta):
        nonlocal evaluations
        evaluations += 1
        m, grad = overlap_and_gradient(theta, unit, cfg)
        return 1.0 - m, -grad

    best_theta, best_m = start, float(build_states(start, cfg)[0] @ unit)
    for restart in range(opt.restarts):
        x0 = start if restart == 0 else rng.uniform(-np.pi, np.pi, cfg.n_params)
        res = minimize(
            objective,
            x0,
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": opt.maxiter, "gtol": opt.gtol, "ftol": 1e-15},
        )
        m = 1.0 - float(res.fun)
        if m > best_m:
            best_theta, best_m = np.asarray(res.x, dtype=np.float64), m
        if 1.0 - best_m < 1e-14:
            break
    achieved = fidelity(build_states(best_theta, cfg)[0], unit)
    logger.debug(f"train_pqc: n_q={cfg.n_q} layers={cfg.layers} fidelity={achieved:.12f} evals={evaluations}")
    return TrainResult(theta=best_theta, fidelity=achieved, overlap=best_m, evaluations=evaluations)


@dataclass(frozen=True)
class EncodedVector:
    target: np.ndarray
    theta: np.ndarray
    recovered: np.ndarray
    fidelity: float
    evaluations: int

    @property
    def linf(self) -> float:
        return float(np.abs(self.recovered - self.target).max())


def smooth_target(size: int) -> np.ndarray:
    """Gaussian bump on a positive floor."""
    x = np.linspace(-1.0, 1.0, size)
    return 0.2 + np.exp(-4.0 * x * x)


def encode_vector(target, layers: int = 8, opt: TrainBudget | SpsaConfig | None = None) -> EncodedVector:
    """Train the ansatz on ``target`` and decode it back with the target's norm as scale."""
    target = np.asarray(target, dtype=np.float64)
    cfg = AnsatzConfig(n_q=max(1, (target.size - 1).bit_length()), layers=layers)
    result = train_pqc(target, cfg, opt)
    recovered = decode_field(build_state(result.theta, cfg), float(np.linalg.norm(target)))
    return EncodedVector(
        target=target,
        theta=result.theta,
        recovered=recovered,
        fidelity=result.fidelity,
        evaluations=result.evaluations,
    )
