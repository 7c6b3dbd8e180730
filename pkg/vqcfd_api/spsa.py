"""Simultaneous-perturbation stochastic approximation.

Exactly two objective evaluations per iteration, independent of the parameter count.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from vqcfd_api.errors import OptimizationError
from vqcfd_api.models.quantum import SpsaConfig

logger = logging.getLogger(__name__)


@dataclass
class SpsaResult:
    theta: np.ndarray
    best_cost: float
    evaluations: int
    # mean of the two perturbed evaluations, one entry per iteration
    trace: list[float] = field(default_factory=list)


def gain_sequences(cfg: SpsaConfig, k: int) -> tuple[float, float]:
    return cfg.a / (k + 1 + cfg.A) ** cfg.alpha, cfg.c / (k + 1) ** cfg.gamma


def perturbation(rng: np.random.Generator, size: int) -> np.ndarray:
    return (2 * rng.integers(0, 2, size=size) - 1).astype(np.float64)


def spsa_minimize(
    costfn: Callable[[np.ndarray], float],
    theta0: np.ndarray,
    cfg: SpsaConfig,
    callback: Callable[[int, np.ndarray, float], None] | None = None,
) -> SpsaResult:
    rng = np.random.default_rng(cfg.seed)
    theta = np.array(theta0, dtype=np.float64)
    best_theta, best_cost = theta.copy(), np.inf
    result = SpsaResult(theta=theta, best_cost=np.inf, evaluations=0)

    for k in range(cfg.max_iters):
        ak, ck = gain_sequences(cfg, k)
        delta = perturbation(rng, theta.size)
        plus, minus = theta + ck * delta, theta - ck * delta
        y_plus, y_minus = float(costfn(plus)), float(costfn(minus))
        result.evaluations += 2
        if not (np.isfinite(y_plus) and np.isfinite(y_minus)):
            raise OptimizationError(f"non-finite cost at iteration {k + 1}", iteration=k + 1)

        if y_plus < best_cost:
            best_theta, best_cost = plus, y_plus
        if y_minus < best_cost:
            best_theta, best_cost = minus, y_minus
        estimate = 0.5 * (y_plus + y_minus)
        result.trace.append(estimate)

        theta = theta - ak * (y_plus - y_minus) / (2.0 * ck) * delta
        if callback is not None:
            callback(k, theta, estimate)

    result.theta = best_theta.copy() if cfg.return_best else theta
    result.best_cost = float(best_cost)
    logger.debug(f"SPSA finished: {cfg.max_iters} iterations, {result.evaluations} evaluations, best={best_cost:.6e}")
    return result
