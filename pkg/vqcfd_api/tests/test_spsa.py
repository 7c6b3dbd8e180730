import numpy as np
import pytest

from vqcfd_api.errors import OptimizationError
from vqcfd_api.models.quantum import SpsaConfig
from vqcfd_api.spsa import gain_sequences, perturbation, spsa_minimize


def bowl(theta):
    return float(theta @ theta)


@pytest.fixture()
def bowl_config() -> SpsaConfig:
    return SpsaConfig(a=1.0, c=0.01, A=50.0, max_iters=500, seed=11)


def test_gains_decay():
    cfg = SpsaConfig(a=1.0, c=0.1, A=10.0)
    a0, c0 = gain_sequences(cfg, 0)
    a9, c9 = gain_sequences(cfg, 9)
    assert a0 == pytest.approx(11.0**-0.602)
    assert c0 == pytest.approx(0.1)
    assert a9 < a0 and c9 < c0


def test_perturbation_is_rademacher(rng):
    delta = perturbation(rng, 1000)
    assert set(np.unique(delta)) == {-1.0, 1.0}


def test_quadratic_bowl_converges(bowl_config, rng):
    theta0 = rng.standard_normal(8)
    result = spsa_minimize(bowl, theta0, bowl_config)
    assert bowl(result.theta) <= 1e-3 * bowl(theta0)
    assert result.best_cost == pytest.approx(bowl(result.theta))


def test_two_evaluations_per_iteration(bowl_config):
    calls = []

    def counted(theta):
        calls.append(theta)
        return bowl(theta)

    cfg = bowl_config.model_copy(update={"max_iters": 37})
    result = spsa_minimize(counted, np.ones(20), cfg)
    assert result.evaluations == len(calls) == 74
    assert len(result.trace) == 37


def test_same_seed_same_trajectory(bowl_config):
    first = spsa_minimize(bowl, np.ones(8), bowl_config)
    second = spsa_minimize(bowl, np.ones(8), bowl_config)
    assert first.trace == second.trace
    np.testing.assert_array_equal(first.theta, second.theta)


def test_final_iterate_when_best_is_not_requested(bowl_config):
    seen = []
    cfg = bowl_config.model_copy(update={"return_best": False, "max_iters": 20})
    result = spsa_minimize(bowl, np.ones(4), cfg, callback=lambda k, theta, cost: seen.append(theta))
    np.testing.assert_array_equal(result.theta, seen[-1])


def test_non_finite_cost_stops_the_run(bowl_config):
    with pytest.raises(OptimizationError) as exc:
        spsa_minimize(lambda theta: float("nan"), np.zeros(3), bowl_config)
    assert exc.value.iteration == 1


def test_exponents_are_validated():
    with pytest.raises(ValueError):
        SpsaConfig(alpha=0.1, gamma=0.2)
