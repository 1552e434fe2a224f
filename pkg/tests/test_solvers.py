import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mimo_secrecy import config
from mimo_secrecy.augmented import make_generator, random_augmented_covariance
from mimo_secrecy.errors import ConfigError, NotPositiveSemidefinite
from mimo_secrecy.matrix_core import min_eigenvalue, random_complex, random_hermitian, random_pd, random_psd
from mimo_secrecy.models import AugmentedCovariance, ChannelPair, PowerBudget, SolverConfig
from mimo_secrecy.secrecy_rates import degradedness, general_rate, proper_rate, random_channel, random_degraded_channel
from mimo_secrecy.solvers import (
    _armijo_ascent,
    maximize_general,
    maximize_proper,
    project_to_budget,
    rate_gradient_general,
    rate_gradient_proper,
    saddle_solve,
)

H = 1e-6


def _central(f):
    return (f(H) - f(-H)) / (2 * H)


# ---------- gradients ----------

def test_gradient_at_origin_is_degradedness_gap(reference_channel):
    G = rate_gradient_proper(reference_channel, np.zeros((2, 2)))
    assert_allclose(G, degradedness(reference_channel).delta, atol=1e-12)


def test_scalar_gradient(scalar_channel):
    assert rate_gradient_proper(scalar_channel, [[1.0]])[0, 0].real == pytest.approx(0.3)


def test_gradient_requires_psd(scalar_channel):
    with pytest.raises(NotPositiveSemidefinite):
        rate_gradient_proper(scalar_channel, [[-1.0]])


def test_proper_gradient_matches_finite_differences(rng):
    for _ in range(50):
        n_t, n_r, n_e = (int(x) for x in rng.integers(1, 5, size=3))
        ch = random_channel(rng, n_t, n_r, n_e)
        K, E = random_pd(rng, n_t), random_hermitian(rng, n_t)
        fd = _central(lambda h: proper_rate(ch, K + h * E).value)
        an = np.vdot(rate_gradient_proper(ch, K), E).real
        assert abs(fd - an) <= 1e-5 * max(1.0, abs(an))


def test_general_gradient_matches_finite_differences(rng):
    for _ in range(50):
        n_t, n_r, n_e = (int(x) for x in rng.integers(1, 4, size=3))
        ch = random_channel(rng, n_t, n_r, n_e)
        aug = random_augmented_covariance(rng, n_t, power=float(rng.uniform(0.5, 3.0)))
        E, S = random_hermitian(rng, n_t), random_complex(rng, n_t, n_t)
        E_tilde = (S + S.T) / 2

        def f(h):
            return general_rate(ch, AugmentedCovariance(aug.K + h * E, aug.K_tilde + h * E_tilde)).value

        E_aug = np.block([[E, E_tilde], [E_tilde.conj(), E.conj()]])
        an = np.vdot(rate_gradient_general(ch, aug), E_aug).real
        assert abs(_central(f) - an) <= 1e-5 * max(1.0, abs(an))


# ---------- projection ----------

def test_projection_example():
    assert_allclose(project_to_budget(np.diag([3.0, -1.0]), PowerBudget(2.0)), np.diag([2.0, 0.0]), atol=1e-12)


def test_feasible_input_is_unchanged(rng):
    K = random_psd(rng, 3, trace=0.8)
    assert_allclose(project_to_budget(K, PowerBudget(1.0)), K, atol=1e-12)


def test_projection_contract_and_optimality(rng):
    budget = PowerBudget(1.5)
    for _ in range(50):
        X = 2.0 * random_hermitian(rng, 3)
        Y = project_to_budget(X, budget)
        assert np.trace(Y).real <= budget.P + 1e-10
        assert min_eigenvalue(Y) >= -1e-12
        assert_allclose(project_to_budget(Y, budget), Y, atol=1e-10)
        best = np.linalg.norm(X - Y)
        for _ in range(100):
            C = random_psd(rng, 3, trace=float(rng.uniform(0.0, budget.P)))
            assert best <= np.linalg.norm(X - C) + 1e-12


# ---------- maximization ----------

def test_scalar_optimum_saturates_budget(scalar_channel):
    trace = maximize_proper(scalar_channel, PowerBudget(1.0))
    assert trace.converged
    assert trace.terminal_rate.value == pytest.approx(math.log(2.5), abs=1e-9)
    assert_allclose(trace.terminal_point, [[1.0]], atol=1e-9)


def test_identical_channels_have_zero_rate():
    H_ = np.array([[1.0, 0.5j], [0.2, -1.0]])
    trace = maximize_proper(ChannelPair(H_, H_), PowerBudget(4.0))
    assert trace.terminal_rate.value <= 1e-6


@pytest.mark.parametrize("method", ["projected-gradient", "dc-iteration"])
def test_traces_are_monotone(rng, method):
    ch = random_channel(rng, 3, 2, 2)
    cfg = SolverConfig(method=method, random_start=True, seed=5)
    for trace in (maximize_proper(ch, PowerBudget(5.0), cfg), maximize_general(ch, PowerBudget(5.0), cfg)):
        assert np.all(np.diff(trace.objective_values) >= -1e-12)
        assert trace.iterates[0][0] == 0


def test_proper_only_general_follows_proper_trajectory(rng):
    ch = random_channel(rng, 2, 2, 2)
    cfg = SolverConfig(random_start=True, seed=11)
    proper = maximize_proper(ch, PowerBudget(3.0), cfg)
    restricted = maximize_general(ch, PowerBudget(3.0), cfg, proper_only=True)
    assert restricted.iterations == proper.iterations
    assert_allclose(restricted.objective_values, proper.objective_values, atol=1e-9)
    assert restricted.terminal_point.is_proper


def test_seeded_runs_are_identical(rng):
    ch = random_channel(rng, 3, 3, 2)
    cfg = SolverConfig(random_start=True, seed=42)
    a = maximize_proper(ch, PowerBudget(2.0), cfg).objective_values
    b = maximize_proper(ch, PowerBudget(2.0), cfg).objective_values
    assert np.array_equal(a, b)


def test_improper_start_returns_to_proper_on_scalar_channel(scalar_channel):
    cfg = SolverConfig(improper_start=True, seed=3, tol_increase=1e-12)
    trace = maximize_general(scalar_channel, PowerBudget(1.0), cfg)
    assert trace.terminal_rate.value == pytest.approx(math.log(2.5), abs=1e-6)
    assert np.linalg.norm(trace.terminal_point.K_tilde) < 1e-4


@pytest.mark.slow
def test_improper_start_matches_proper_on_degraded_channels():
    rng = make_generator(7)
    for i in range(50):
        n_t = int(rng.integers(1, 4))
        ch = random_degraded_channel(rng, n_t, int(rng.integers(1, 4)))
        budget = PowerBudget(float(rng.uniform(0.5, 5.0)))
        proper = maximize_proper(ch, budget, SolverConfig(tol_increase=1e-10))
        general = maximize_general(ch, budget, SolverConfig(improper_start=True, seed=i, tol_increase=1e-10))
        assert abs(general.terminal_rate.value - proper.terminal_rate.value) <= 1e-3
        assert np.linalg.norm(general.terminal_point.K_tilde) < 1e-2


@pytest.mark.slow
def test_proper_and_general_agree_on_random_channels():
    rng = make_generator(8)
    for _ in range(50):
        n_t, n_r, n_e = (int(x) for x in rng.integers(1, 4, size=3))
        ch = random_channel(rng, n_t, n_r, n_e)
        budget = PowerBudget(float(rng.uniform(0.5, 5.0)))
        proper = maximize_proper(ch, budget)
        general = maximize_general(ch, budget)
        assert abs(general.terminal_rate.value - proper.terminal_rate.value) <= 1e-3


def test_dc_iteration_reaches_projected_gradient_optimum(rng):
    ch = random_degraded_channel(rng, 2, 2)
    budget = PowerBudget(2.0)
    pg = maximize_proper(ch, budget, SolverConfig(tol_increase=1e-10))
    dc = maximize_proper(ch, budget, SolverConfig(method="dc-iteration", tol_increase=1e-10))
    assert dc.method == "dc-iteration"
    assert dc.terminal_rate.value == pytest.approx(pg.terminal_rate.value, abs=1e-4)


def test_reference_channel_proper_and_general_agree(reference_channel):
    budget = PowerBudget.from_snr_db(6.0)
    proper = maximize_proper(reference_channel, budget)
    general = maximize_general(reference_channel, budget)
    assert abs(general.terminal_rate.value - proper.terminal_rate.value) <= 1e-4


@pytest.mark.parametrize("mode", ["proper", "general"])
def test_projected_gradient_reaches_reference_rate_at_high_snr(reference_channel, mode):
    budget = PowerBudget.from_snr_db(12.0)
    run = maximize_proper if mode == "proper" else maximize_general
    trace = run(reference_channel, budget)
    expected = config.REFERENCE_RATES[(mode, "projected-gradient")][12.0]
    assert trace.converged
    assert abs(trace.terminal_rate.value - expected) <= config.UNIT_MATCH_TOL


def test_exhausted_backtracking_is_not_converged():
    cfg = SolverConfig(max_backtracks=5)
    X, values, converged = _armijo_ascent(
        lambda X: -np.trace(X).real,
        lambda X: np.eye(2),
        lambda X: X,
        1.0,
        np.zeros((2, 2)),
        cfg,
        tol=1e-5,
        max_iters=10,
    )
    assert not converged
    assert values == [0.0]


def test_stationary_start_stops_at_once(scalar_channel):
    # white start already spends the full budget on the only antenna
    trace = maximize_proper(scalar_channel, PowerBudget(2.0))
    assert trace.converged
    assert trace.iterations == 0


# ---------- saddle ----------

def test_saddle_on_scalar_degraded_channel(scalar_channel):
    res = saddle_solve(scalar_channel, PowerBudget(1.0), SolverConfig(tol_increase=1e-9))
    assert res.value.value == pytest.approx(math.log(2.5), abs=1e-3)
    # the eavesdropper output is made a degraded copy of the legitimate one
    assert res.noise.A[0, 0].real == pytest.approx(0.5, abs=0.05)
    assert np.all(np.diff(res.outer_values) <= 1e-12)


def test_saddle_on_identical_scalar_channels():
    ch = ChannelPair(np.array([[1.0]]), np.array([[1.0]]))
    res = saddle_solve(ch, PowerBudget(1.0))
    assert res.value.value <= 1e-4


@pytest.mark.slow
def test_saddle_value_matches_proper_optimum(reference_channel):
    budget = PowerBudget.from_snr_db(6.0)
    proper = maximize_proper(reference_channel, budget, SolverConfig(tol_increase=1e-9))
    res = saddle_solve(reference_channel, budget, SolverConfig(tol_increase=1e-8))
    assert res.value.value >= proper.terminal_rate.value - 1e-6
    assert res.value.value == pytest.approx(proper.terminal_rate.value, abs=1e-3)


@pytest.mark.slow
def test_saddle_value_matches_proper_optimum_on_random_channels():
    rng = make_generator(8)
    for _ in range(50):
        n_t, n_r, n_e = (int(x) for x in rng.integers(1, 4, size=3))
        ch = random_channel(rng, n_t, n_r, n_e)
        budget = PowerBudget(float(rng.uniform(0.5, 5.0)))
        proper = maximize_proper(ch, budget, SolverConfig(method="dc-iteration", tol_increase=1e-9))
        res = saddle_solve(ch, budget, SolverConfig(tol_increase=1e-8))
        assert res.value.value == pytest.approx(proper.terminal_rate.value, abs=1e-3)


@pytest.mark.slow
def test_pseudo_noise_correlation_does_not_lower_the_saddle_value(scalar_channel):
    res = saddle_solve(scalar_channel, PowerBudget(1.0), SolverConfig(tol_increase=1e-9), pseudo=True)
    assert res.value.value == pytest.approx(math.log(2.5), abs=1e-3)
    assert isinstance(res.covariance, AugmentedCovariance)


# ---------- config ----------

def test_solver_config_validation():
    with pytest.raises(ConfigError):
        SolverConfig(tol_increase=0.0)
    with pytest.raises(ConfigError):
        SolverConfig(method="newton")
