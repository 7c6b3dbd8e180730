import numpy as np
import pytest

from vqcfd_api import quantum
from vqcfd_api.errors import DimensionError, QubitLimitError
from vqcfd_api.models.quantum import AnsatzConfig, ShotModel, SpsaConfig, TrainBudget


def test_zero_parameters_give_the_first_basis_state():
    cfg = AnsatzConfig(n_q=3, layers=2)
    state = quantum.build_state(np.zeros(cfg.n_params), cfg)
    expected = np.zeros(8)
    expected[0] = 1.0
    np.testing.assert_allclose(state.real_part(), expected, atol=1e-15)


def test_two_qubit_single_layer_example():
    cfg = AnsatzConfig(n_q=2, layers=1)
    state = quantum.build_state(np.array([np.pi / 2, np.pi / 2]), cfg)
    np.testing.assert_allclose(state.real_part(), [0.5, 0.5, 0.5, -0.5], atol=1e-12)


def test_first_layer_entangles_even_pairs_only():
    cfg = AnsatzConfig(n_q=3, layers=1)
    state = quantum.build_state(np.full(3, np.pi / 2), cfg)
    expected = np.full(8, 0.5 / np.sqrt(2.0))
    expected[[6, 7]] *= -1.0
    np.testing.assert_allclose(state.real_part(), expected, atol=1e-12)


def test_second_layer_entangles_odd_pairs():
    cfg = AnsatzConfig(n_q=3, layers=2)
    theta = np.array([0.0, 0.0, 0.0, 0.0, np.pi / 2, np.pi / 2])
    state = quantum.build_state(theta, cfg)
    np.testing.assert_allclose(state.real_part(), [0.5, 0.5, 0.5, -0.5, 0.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_states_are_normalised_and_real(rng):
    cfg = AnsatzConfig(n_q=4, layers=8)
    thetas = rng.uniform(-np.pi, np.pi, size=(5, cfg.n_params))
    states = quantum.build_states(thetas, cfg)
    np.testing.assert_allclose(np.linalg.norm(states, axis=1), 1.0, atol=1e-12)
    for theta, batched in zip(thetas, states):
        np.testing.assert_allclose(quantum.build_state(theta, cfg).real_part(), batched, atol=1e-14)


def test_parameter_count_is_checked():
    cfg = AnsatzConfig(n_q=3, layers=2)
    with pytest.raises(DimensionError):
        quantum.build_state(np.zeros(5), cfg)


def test_qubit_cap():
    with pytest.raises(QubitLimitError):
        AnsatzConfig(n_q=15)


def test_complex_state_cannot_be_decoded():
    state = quantum.StateVector(n_q=1, amplitudes=np.array([1.0, 1.0j]) / np.sqrt(2.0))
    with pytest.raises(DimensionError):
        quantum.decode_field(state, 1.0)


def test_decode_scales_amplitudes():
    state = quantum.StateVector(n_q=1, amplitudes=np.array([0.6, 0.8], dtype=np.complex128))
    np.testing.assert_allclose(quantum.decode_field(state, 5.0), [3.0, 4.0])


def test_multiproduct_examples():
    assert quantum.multiproduct([[1, 2], [3, 4]]) == 11.0
    assert quantum.multiproduct([[1, 2], [3, 4], [5, 6]]) == 63.0



def test_multiproduct_is_multilinear(rng):
    v1, w, v2, v3 = rng.standard_normal((4, 16))
    a, b = 1.7, -0.4
    combined = quantum.multiproduct([a * v1 + b * w, v2, v3])
    expected = a * quantum.multiproduct([v1, v2, v3]) + b * quantum.multiproduct([w, v2, v3])
    assert combined == pytest.approx(expected, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("vectors", [[[1.0, 2.0]], [[1.0, 2.0], [1.0, 2.0, 3.0]], [[], []]])
def test_multiproduct_rejects_bad_input(vectors):
    with pytest.raises(DimensionError):
        quantum.multiproduct(vectors)


def test_shot_noise_shrinks_with_more_shots():
    few = ShotModel(n_shots=1_000, seed=1)
    many = ShotModel(n_shots=100_000, seed=2)
    wide = np.std([quantum.estimate_multiproduct(0.3, 1.0, few) for _ in range(400)])
    narrow = np.std([quantum.estimate_multiproduct(0.3, 1.0, many) for _ in range(400)])
    assert 8.0 <= wide / narrow <= 12.5


def test_shot_stream_is_reproducible():
    a = [quantum.estimate_multiproduct(0.0, 1.0, ShotModel(seed=7)) for _ in range(3)]
    b = [quantum.estimate_multiproduct(0.0, 1.0, ShotModel(seed=7)) for _ in range(3)]
    assert a == b


def test_shot_estimate_is_unbiased_across_seeds():
    exact, bound, n_shots = 0.3, 1.0, 10_000
    sigma = bound / np.sqrt(n_shots)
    estimates = [
        quantum.estimate_multiproduct(exact, bound, ShotModel(n_shots=n_shots, seed=seed)) for seed in range(10_000)
    ]
    assert abs(np.mean(estimates) - exact) <= 3.0 * sigma / 100.0


def test_huge_shot_count_leaves_the_exact_value():
    estimate = quantum.estimate_multiproduct(0.25, 2.0, ShotModel(n_shots=10**12, seed=5))
    assert estimate == pytest.approx(0.25, abs=1e-5 * 2.0)


def test_fidelity_ignores_target_scale_but_not_direction():
    amplitudes = np.array([0.6, 0.8])
    assert quantum.fidelity(amplitudes, [3.0, 4.0]) == pytest.approx(1.0)
    assert quantum.fidelity(amplitudes, [-30.0, -40.0]) == pytest.approx(1.0)
    assert quantum.fidelity(amplitudes, [4.0, -3.0]) == pytest.approx(0.0, abs=1e-15)

def test_overlap_gradient_matches_finite_differences(rng):
    cfg = AnsatzConfig(n_q=3, layers=3)
    target = rng.standard_normal(cfg.dim)
    target /= np.linalg.norm(target)
    theta = rng.uniform(-np.pi, np.pi, cfg.n_params)
    _, grad = quantum.overlap_and_gradient(theta, target, cfg)
    h = 1e-6
    for j in range(cfg.n_params):
        step = np.zeros(cfg.n_params)
        step[j] = h
        up = quantum.build_states(theta + step, cfg)[0] @ target
        down = quantum.build_states(theta - step, cfg)[0] @ target
        assert grad[j] == pytest.approx((up - down) / (2 * h), abs=1e-8)


def test_smooth_vector_round_trips_through_the_circuit():
    target = quantum.smooth_target(16)
    encoded = quantum.encode_vector(target, layers=8)
    assert encoded.fidelity >= 0.999
    assert encoded.linf <= 0.05 * np.linalg.norm(target)


def test_discretised_sine_reaches_high_fidelity():
    target = np.sin(2.0 * np.pi * np.arange(16) / 16.0)
    result = quantum.train_pqc(target, AnsatzConfig(n_q=4, layers=8), TrainBudget(restarts=16, seed=2))
    assert result.fidelity >= 0.999
    assert result.fidelity == pytest.approx(result.overlap**2)


def test_basis_target_is_met_by_zero_parameters():
    cfg = AnsatzConfig(n_q=3, layers=2)
    target = np.zeros(8)
    target[0] = 2.5
    result = quantum.train_pqc(target, cfg)
    assert result.fidelity == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(result.theta, np.zeros(cfg.n_params))

def test_fidelity_grows_with_depth():
    target = quantum.smooth_target(16)
    fidelities = [quantum.encode_vector(target, layers=layers).fidelity for layers in (2, 4, 8)]
    assert fidelities[1] >= fidelities[0] - 1e-3
    assert fidelities[2] >= fidelities[1] - 1e-3


def test_training_recovers_sign_of_negative_target():
    target = -quantum.smooth_target(8)
    encoded = quantum.encode_vector(target, layers=6)
    assert encoded.fidelity >= 0.99
    assert np.dot(encoded.recovered, target) > 0.0


def test_spsa_training_counts_two_evaluations_per_iteration():
    cfg = AnsatzConfig(n_q=2, layers=2)
    result = quantum.train_pqc(np.array([1.0, 1.0, 1.0, 1.0]), cfg, SpsaConfig(max_iters=40, seed=3))
    assert result.evaluations == 80
    assert 0.0 <= result.fidelity <= 1.0 + 1e-12


@pytest.mark.parametrize("target", [np.zeros(4), np.ones(6), np.ones(2)])
def test_train_rejects_unencodable_targets(target):
    with pytest.raises(DimensionError):
        quantum.train_pqc(target, AnsatzConfig(n_q=2))
