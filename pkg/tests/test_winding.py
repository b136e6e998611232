import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sizewinding import ensembles as E
from sizewinding import winding as W
from sizewinding.errors import IllConditionedError, MalformedInputError, ResourceLimitError, UndefinedFitError
from sizewinding.exact_sim import CouplingSpec, Evolver
from sizewinding.pauli import PauliString, dense
from sizewinding.special import f_semicircle


def gue(n, seed=2):
    return E.sample(E.EnsembleSpec("gue", n, seed=seed))


X1 = PauliString.from_label("XII")


# coefficients


def test_unevolved_pauli_has_one_coefficient():
    c = W.pauli_coefficients(gue(3), 0.0, X1, 0.0)
    assert c[X1] == pytest.approx(1.0)
    assert np.sum(np.abs(c.values) > 1e-12) == 1


def test_thermal_support_at_zero_time():
    h = gue(3)
    beta = 1.0
    c = W.pauli_coefficients(h, beta, X1, 0.0)
    ref = W.pauli_coefficients_of_matrix(Evolver(h).sqrt_thermal(beta) @ dense(X1))
    assert np.allclose(c.values, ref.values)
    assert np.sum(np.abs(c.values) > 1e-12) > 1


def test_reconstruction_and_parseval(rng):
    h = gue(3)
    ev = Evolver(h)
    beta, t = 0.8, 1.7
    c = W.pauli_coefficients(h, beta, X1, t)
    x = ev.sqrt_thermal(beta) @ ev.heisenberg(dense(X1), t)
    assert np.abs(c.to_matrix() - x).max() < 1e-10
    # Parseval against the density-matrix trace
    rho = ev.sqrt_thermal(beta) @ ev.sqrt_thermal(beta)
    o_t = ev.heisenberg(dense(X1), t)
    assert np.sum(np.abs(c.values) ** 2) == pytest.approx(np.trace(o_t @ rho @ o_t).real)
    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    assert np.allclose(W.pauli_coefficients_of_matrix(m).to_matrix(), m)


def test_coefficient_cap():
    with pytest.raises(ResourceLimitError):
        W.pauli_coefficients_of_matrix(np.eye(256))
    with pytest.raises(MalformedInputError):
        W.pauli_coefficients_of_matrix(np.eye(6))


# distributions


def test_infinite_temperature_winding_equals_conventional():
    dist = W.distributions_from_coefficients(W.pauli_coefficients(gue(4), 0.0, PauliString.from_label("XIII"), 2.0))
    assert np.allclose(dist.q, dist.p, atol=1e-12)
    assert dist.p.sum() == pytest.approx(1.0)


def test_unevolved_distribution_is_delta():
    dist = W.distributions_from_coefficients(W.pauli_coefficients(gue(3), 0.0, X1, 0.0))
    assert np.allclose(dist.q, [0, 1, 0, 0])


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_winding_bounded_by_conventional(seed):
    dist = W.distributions_from_coefficients(W.pauli_coefficients(gue(4, seed), 3.0, PauliString.from_label("XIII"), 1.0))
    assert np.all(np.abs(dist.q) <= dist.p + 1e-12)


def test_two_branch_structure_in_gue_average():
    n = 6
    spec = E.EnsembleSpec("gue", n, samples=6, seed=4)
    x = PauliString.from_label("X" + "I" * (n - 1))
    p = np.mean(
        [W.distributions_from_coefficients(W.pauli_coefficients(h, 0.0, x, 1.5)).p for h in E.iter_samples(spec)], axis=0
    )
    delta = abs(f_semicircle(1.5j)) ** 4
    assert p[1] > 0.5 * delta
    bulk = p.copy()
    bulk[1] = 0
    mean_bulk = np.sum(np.arange(n + 1) * bulk) / bulk.sum()
    assert abs(mean_bulk - 0.75 * n) < 0.5


def test_axis_validation():
    c = W.pauli_coefficients(gue(2), 0.0, PauliString.from_label("XI"), 0.0)
    with pytest.raises(MalformedInputError):
        W.distributions_from_coefficients(c, axis="weight")
    with pytest.raises(MalformedInputError):
        W.distributions_from_coefficients(W.PauliCoefficients(1, np.zeros(4)))


# Fourier inversion


@pytest.mark.parametrize("beta", [0.0, 2.0])
def test_fourier_inversion_matches_direct_expansion(beta):
    n = 5
    h = gue(n)
    x = PauliString.from_label("XIIII")
    spec = CouplingSpec.all_sites(n)
    inverted = W.fourier_distribution(h, beta, x, 1.2, spec=spec)
    direct = W.distributions_from_coefficients(W.pauli_coefficients(h, beta, x, 1.2), "xy_weight", spec.mask)
    assert np.abs(inverted.q - direct.q).max() < 1e-8
    assert np.abs(inverted.p - direct.p).max() < 1e-8
    if beta == 0:
        assert np.abs(inverted.q.imag).max() < 1e-8


def test_fourier_zero_point_is_total_winding():
    n = 4
    h = gue(n)
    x = PauliString.from_label("XIII")
    spec = CouplingSpec.all_sites(n)
    inverted = W.fourier_distribution(h.T, 1.0, x, 0.5, spec=spec)
    from sizewinding.exact_sim import size_generating_function

    g0 = size_generating_function(h.T, 1.0, x, 0.5, 0.0, spec, True)
    assert inverted.q.sum() * inverted.norm == pytest.approx(g0, abs=1e-10)


def test_fourier_rejects_degenerate_grid():
    h = gue(3)
    with pytest.raises(IllConditionedError) as err:
        W.fourier_distribution(h, 0.0, X1, 1.0, g_grid=[0.0, 0.0, 0.0, 0.0])
    assert err.value.args
    with pytest.raises(MalformedInputError):
        W.fourier_distribution(h, 0.0, X1, 1.0, g_grid=[0.0, 1.0])


def test_xy_weight_to_size_preserves_mass():
    d = W.WindingDistribution(n=3, q=[0, 1, 0, 0], p=[0, 1, 0, 0], axis="xy_weight")
    s = W.xy_weight_to_size(d)
    assert s.p.sum() == pytest.approx(1.0)
    assert np.allclose(s.p, [0, 0.25, 0.5, 0.25])


# perfect winding


def _constructed(n, alpha, rng, flip=None):
    r = rng.standard_normal(4**n)
    if flip is not None:
        r[flip] *= -1
    c = W.PauliCoefficients(n, r.astype(complex))
    c.values = np.exp(1j * alpha * c.sizes() / n) * r
    return W.distributions_from_coefficients(c)


def test_infinite_temperature_is_perfect_with_zero_rate():
    dist = W.distributions_from_coefficients(W.pauli_coefficients(gue(4), 0.0, PauliString.from_label("XIII"), 2.0))
    res = W.check_perfect_winding(dist)
    assert res.is_perfect and abs(res.alpha_fit) < 1e-10


@given(st.floats(-1.2, 1.2), st.integers(0, 2**32 - 1))
def test_constructed_winding_recovers_rate(alpha, seed):
    rng = np.random.default_rng(seed)
    res = W.check_perfect_winding(_constructed(4, alpha, rng))
    assert res.is_perfect
    assert abs(res.alpha_fit - alpha) < 1e-6


@given(st.integers(0, 255), st.integers(0, 2**32 - 1))
def test_sign_flip_keeps_perfect_winding(index, seed):
    alpha = 0.9
    a = W.check_perfect_winding(_constructed(4, alpha, np.random.default_rng(seed)))
    b = W.check_perfect_winding(_constructed(4, alpha, np.random.default_rng(seed), flip=index))
    assert a.is_perfect == b.is_perfect


def test_low_temperature_gue_winding_is_imperfect():
    n = 5
    dist = W.distributions_from_coefficients(W.pauli_coefficients(gue(n) * 1.0, 20.0, PauliString.from_label("XIIII"), 1.0))
    res = W.check_perfect_winding(dist)
    # size 0 holds the identity alone, where |q| = p trivially
    keep = (dist.p > 1e-6 * dist.p.max()) & (dist.sizes > 0)
    assert np.all(np.abs(dist.q[keep]) < dist.p[keep])
    assert not res.is_perfect


def test_empty_distribution_has_no_fit():
    with pytest.raises(UndefinedFitError):
        W.check_perfect_winding(W.WindingDistribution(n=2, q=np.zeros(3), p=np.zeros(3)))
