import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mimo_secrecy.augmented import (
    assemble_augmented,
    augment_channel,
    augment_noise_correlation,
    augmented_from_composite,
    composite_covariance,
    composite_from_augmented,
    estimate_augmented,
    m_matrix,
    proper_covariance,
    random_augmented_covariance,
    real_composite_rate,
    repair_pattern,
    sample_gaussian,
    split_augmented,
    to_real_composite,
    validate_augmented,
)
from mimo_secrecy.errors import CountError, DimensionError, InfeasibleSecondOrder, InvalidMatrix, NotSymmetric
from mimo_secrecy.matrix_core import min_eigenvalue, random_complex, random_psd
from mimo_secrecy.models import AugmentedCovariance, ChannelPair, SampleBatch
from mimo_secrecy.secrecy_rates import general_rate, random_channel


def test_proper_covariance_is_feasible():
    aug = proper_covariance(np.eye(2))
    assert aug.is_proper
    assert aug.power == pytest.approx(2.0)


def test_maximally_improper_boundary_is_feasible():
    aug = validate_augmented([[1.0]], [[1.0]])
    assert min_eigenvalue(aug.matrix) == pytest.approx(0.0, abs=1e-12)


def test_infeasible_pseudo_covariance():
    with pytest.raises(InfeasibleSecondOrder):
        validate_augmented([[1.0]], [[2.0]])
    with pytest.raises(InfeasibleSecondOrder):
        validate_augmented([[1.0]], [[1.1]])


def test_validation_errors():
    with pytest.raises(NotSymmetric):
        validate_augmented(np.eye(2), [[0.0, 0.1], [0.0, 0.0]])
    with pytest.raises(InvalidMatrix):
        validate_augmented([[1.0, 1j], [1j, 1.0]], np.zeros((2, 2)))
    with pytest.raises(DimensionError):
        validate_augmented(np.eye(2), np.zeros((3, 3)))


def test_repair_pattern_averages_drift(rng):
    aug = random_augmented_covariance(rng, 3, power=2.0)
    drifted = aug.matrix + 1e-9 * random_complex(rng, 6, 6)
    repaired = split_augmented(repair_pattern(drifted))
    assert_allclose(repaired.K, aug.K, atol=1e-8)
    assert_allclose(repaired.K_tilde, repaired.K_tilde.T, atol=0)


def test_augment_channel_and_noise_correlation():
    H = np.array([[1 + 1j, 2.0]])
    assert_allclose(augment_channel(H), [[1 + 1j, 2, 0, 0], [0, 0, 1 - 1j, 2]])
    A, B = np.array([[0.1j]]), np.array([[0.2]])
    assert_allclose(augment_noise_correlation(A, B), [[0.1j, 0.2], [0.2, -0.1j]])


def test_m_matrix_is_scaled_unitary():
    M = m_matrix(3)
    assert_allclose(M @ M.conj().T, 2 * np.eye(6), atol=1e-15)


def test_real_composite_channel_two_routes(rng):
    ch = random_channel(rng, 3, 2, 2)
    assert_allclose(composite_from_augmented(ch.H_r), to_real_composite(ch).H_r, atol=1e-12)
    H = np.array([[1 + 2j]])
    assert_allclose(composite_from_augmented(H), math.sqrt(2) * np.array([[1.0, -2.0], [2.0, 1.0]]), atol=1e-12)


def test_composite_covariance_of_white_proper_signal():
    assert_allclose(composite_covariance(proper_covariance(np.eye(2))), 0.5 * np.eye(4), atol=1e-15)


def test_composite_covariance_inverts(rng):
    aug = random_augmented_covariance(rng, 3, power=1.5)
    back = augmented_from_composite(composite_covariance(aug))
    assert_allclose(back.K, aug.K, atol=1e-12)
    assert_allclose(back.K_tilde, aug.K_tilde, atol=1e-12)


def test_random_augmented_covariance_power_and_impropriety(rng):
    aug = random_augmented_covariance(rng, 2, power=3.0, rank=1)
    assert aug.power == pytest.approx(3.0)
    assert not aug.is_proper
    assert min_eigenvalue(aug.matrix) > -1e-10


def test_real_composite_rate_equals_general_rate(rng):
    for _ in range(20):
        ch = random_channel(rng, 2, 3, 2)
        aug = random_augmented_covariance(rng, 2, power=float(rng.uniform(0.5, 4.0)))
        assert real_composite_rate(ch, aug) == pytest.approx(general_rate(ch, aug).value, abs=1e-9)


def test_sampler_counts():
    aug = proper_covariance(np.eye(1))
    with pytest.raises(CountError):
        sample_gaussian(aug, 0, seed=1)
    with pytest.raises(CountError):
        estimate_augmented(sample_gaussian(aug, 1, seed=1))
    with pytest.raises(CountError):
        SampleBatch(np.zeros((0, 2)))


def test_sampler_is_deterministic():
    aug = validate_augmented([[2.0, 0.3j], [-0.3j, 1.0]], [[0.5, 0.1], [0.1, -0.2]])
    a = sample_gaussian(aug, 50, seed=7).samples
    b = sample_gaussian(aug, 50, seed=7).samples
    assert np.array_equal(a, b)


@pytest.mark.parametrize("K, K_tilde", [
    ([[2.0, 0.3j], [-0.3j, 1.0]], [[0.5, 0.1], [0.1, -0.2]]),
    ([[1.0]], [[1.0]]),                  # maximally improper: a real signal
    ([[1.0]], [[1j]]),                   # maximally improper, rotated
])
def test_sample_moments_match_targets(K, K_tilde):
    aug = validate_augmented(K, K_tilde)
    K_hat, K_tilde_hat = estimate_augmented(sample_gaussian(aug, 100_000, seed=3))
    assert np.max(np.abs(K_hat - aug.K)) < 0.05
    assert np.max(np.abs(K_tilde_hat - aug.K_tilde)) < 0.05


def test_feasibility_verdict_matches_eigenvalue_check(rng):
    checked = 0
    for _ in range(500):
        n = int(rng.integers(1, 4))
        K = random_psd(rng, n, trace=float(rng.uniform(0.5, 3.0)))
        S = random_complex(rng, n, n)
        K_tilde = float(rng.uniform(0.0, 1.5)) * (S + S.T) / 2
        lam = float(np.linalg.eigvalsh(assemble_augmented(K, K_tilde)).min())
        if abs(lam) < 1e-8:
            continue
        checked += 1
        if lam > 0:
            validate_augmented(K, K_tilde)
        else:
            with pytest.raises(InfeasibleSecondOrder):
                validate_augmented(K, K_tilde)
    assert checked > 450


def test_composite_covariance_is_real_symmetric_psd_with_same_power(rng):
    for _ in range(50):
        n = int(rng.integers(1, 4))
        aug = random_augmented_covariance(rng, n, power=float(rng.uniform(0.1, 5.0)))
        K_bar = composite_covariance(aug)
        assert K_bar.dtype == float
        assert_allclose(K_bar, K_bar.T, atol=0)
        assert np.linalg.eigvalsh(K_bar).min() >= -1e-12
        assert np.trace(K_bar) == pytest.approx(np.trace(aug.K).real, rel=1e-12)


def test_maximally_improper_scalar_composite():
    K_bar = composite_covariance(AugmentedCovariance(np.array([[1.0]]), np.array([[1.0]])))
    assert_allclose(K_bar, [[1.0, 0.0], [0.0, 0.0]], atol=1e-15)


def test_real_composite_of_imaginary_unit():
    comp = to_real_composite(ChannelPair(np.array([[1j]]), np.array([[0.0]])))
    assert_allclose(comp.H_r, [[0.0, -math.sqrt(2)], [math.sqrt(2), 0.0]], atol=1e-15)


def test_proper_embedding_keeps_budget(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        P = float(rng.uniform(0.1, 10.0))
        K = random_psd(rng, n, trace=float(rng.uniform(0.0, P)))
        aug = proper_covariance(K)
        assert aug.is_proper
        assert np.trace(aug.matrix).real <= 2 * P + 1e-9
