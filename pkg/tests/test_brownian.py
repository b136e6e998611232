from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sizewinding import _fallback
from sizewinding import brownian as B
from sizewinding import kernels
from sizewinding.errors import MalformedInputError, ResourceLimitError


def random_distribution(n, seed):
    q = np.random.default_rng(seed).random(n + 1)
    return q / q.sum()


# master equation


@given(st.integers(2, 60), st.integers(0, 2**32 - 1))
def test_rhs_conserves_probability(n, seed):
    assert abs(B.master_rhs(random_distribution(n, seed), n).sum()) < 1e-12


def test_identity_never_grows():
    assert np.array_equal(B.master_rhs(B.delta_distribution(5, 0), 5), np.zeros(6))


@pytest.mark.parametrize("n", [2, 10, 50, 400])
def test_stationary_fixed_point(n):
    q = B.stationary_distribution(n)
    assert np.abs(B.master_rhs(q, n)).max() <= 1e-10


def test_stationary_matches_counting():
    n = 6
    exact = np.array([3**l * comb(n, l) for l in range(n + 1)], float)
    exact[0] = 0
    assert np.allclose(B.stationary_distribution(n), exact / (4**n - 1), rtol=1e-13, atol=0)


def test_rates_for_single_qubit_string():
    # size 1 grows at 3(n-1)/n and cannot shrink
    n = 8
    rhs = B.master_rhs(B.delta_distribution(n, 1), n)
    assert rhs[1] == pytest.approx(-3 * (n - 1) / n)
    assert rhs[2] == pytest.approx(3 * (n - 1) / n)
    assert rhs[0] == 0


# integration


def test_late_time_mean_at_400():
    traj = B.integrate(B.delta_distribution(400, 1), 400, [2.0, 6.0, 10.0])
    assert abs(traj.mean()[-1] - 300) <= 1


def test_mean_size_grows_monotonically():
    traj = B.integrate(B.delta_distribution(100, 1), 100, np.linspace(0.1, 6, 40))
    assert np.all(np.diff(traj.mean()) >= -1e-12)


def test_overdispersion_window():
    traj = B.integrate(B.delta_distribution(400, 1), 400, [0.5, 1.0, 6.0])
    ratio = traj.std() / traj.mean()
    assert ratio[0] > 0.5 and ratio[1] > 0.5
    assert ratio[2] < 0.05


def test_large_n_collapse_after_log_shift():
    fractions = []
    for n in (200, 400):
        traj = B.integrate(B.delta_distribution(n, 1), n, np.array([0.0, 0.5, 1.0]) + np.log(n) / 3)
        fractions.append(traj.mean() / n)
    assert np.abs(fractions[0] - fractions[1]).max() < 0.01


def test_conservation_monitor_rejects_unstable_step():
    with pytest.raises(B.StepSizeError):
        B.integrate(B.delta_distribution(50, 1), 50, 1.0, dt=1.0)


def test_integrate_validation():
    with pytest.raises(MalformedInputError):
        B.integrate([0.5, 0.4, 0.0], 2, 1.0)
    with pytest.raises(MalformedInputError):
        B.integrate(B.delta_distribution(2, 1), 2, [1.0, 0.5])
    with pytest.raises(MalformedInputError):
        B.integrate(B.delta_distribution(2, 1), 2, 1.0).at(0.3)


def test_trajectory_rows():
    traj = B.integrate(B.delta_distribution(2, 1), 2, 0.5)
    rows = list(traj.rows())
    assert len(rows) == 6 and rows[0] == (0.0, 0, 0.0)


# stochastic oracle


def test_oracle_at_time_zero():
    assert np.array_equal(B.stochastic_oracle(6, 2, 0.0, 100), B.delta_distribution(6, 2))


def test_oracle_reaches_stationary_distribution():
    n, trials = 8, 40000
    hist = B.stochastic_oracle(n, 1, 12.0, trials, seed=3)
    stat = B.stationary_distribution(n)
    se = np.sqrt(stat * (1 - stat) / trials)
    assert np.all(np.abs(hist - stat) <= 4 * se + 1e-12)


def test_oracle_matches_ode_at_n10():
    n = 10
    times = [0.5, 1.0, 2.0]
    hist = B.stochastic_oracle(n, 1, times, 20000, seed=1)
    traj = B.integrate(B.delta_distribution(n, 1), n, times)
    for k in range(3):
        assert B.total_variation(hist[k], traj.q[k]) <= 0.05


def test_oracle_is_reproducible():
    a = B.stochastic_oracle(6, 1, [0.3, 1.0], 9000, seed=5)
    b = B.stochastic_oracle(6, 1, [0.3, 1.0], 9000, seed=5)
    assert np.array_equal(a, b)


def test_oracle_limits():
    with pytest.raises(ResourceLimitError):
        B.stochastic_oracle(17, 1, 1.0, 10)
    with pytest.raises(MalformedInputError):
        B.stochastic_oracle(4, 5, 1.0, 10)


# continuum form


@given(st.integers(2, 80), st.integers(0, 2**32 - 1))
def test_continuum_step_is_master_equation(n, seed):
    q = random_distribution(n, seed)
    assert np.abs(B.continuum_step(q, 1.0 / n, n) - B.master_rhs(q, n)).max() < 1e-12


def test_continuum_step_conserves_mass():
    n = 40
    q = random_distribution(n, 0)
    assert abs(B.continuum_step(q, 1.0 / n, n).sum() / n) < 1e-12
    with pytest.raises(MalformedInputError):
        B.continuum_step(q, 0.1, n)


# compiled kernels


@pytest.mark.skipif(kernels.IMPLEMENTATION != "compiled", reason="extension not built")
def test_compiled_kernels_match_fallback():
    n = 30
    q0 = B.delta_distribution(n, 1)
    steps, sizes = np.array([40, 10]), np.array([0.01, 0.02])
    assert np.array_equal(kernels.rk4_integrate(q0, n, steps, sizes), _fallback.rk4_integrate(q0, n, steps, sizes))
    rng = np.random.default_rng(0)
    choices = rng.integers(0, 9 * comb(6, 2), size=500)
    offsets = np.array([0, 200, 500])
    checkpoints = np.array([[50, 200], [100, 300]])
    args = (0, 0b110000, 6, choices, offsets, checkpoints)
    assert np.array_equal(kernels.pauli_jump_sizes(*args), _fallback.pauli_jump_sizes(*args))
