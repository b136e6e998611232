import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sizewinding import ensembles as E
from sizewinding.errors import MalformedInputError
from sizewinding.exact_sim import CouplingSpec, Evolver, size_generating_function
from sizewinding.pauli import PauliString, dense
from sizewinding.special import f_semicircle as f

# sampling


def test_sampling_is_reproducible_and_hermitian():
    spec = E.EnsembleSpec("gue", 3, samples=2, seed=9)
    a, b = E.sample(spec, 1), E.sample(spec, 1)
    assert np.array_equal(a, b)
    assert np.allclose(a, a.conj().T)
    assert not np.allclose(E.sample(spec, 0), a)
    goe = E.sample(E.EnsembleSpec("goe", 3, seed=9))
    assert np.isrealobj(goe) and np.allclose(goe, goe.T)


@pytest.mark.parametrize("kind", ["gue", "goe"])
def test_semicircle_at_d512(kind):
    h = E.sample(E.EnsembleSpec(kind, 9, seed=1))
    ev = np.linalg.eigvalsh(h)
    assert abs(np.abs(ev).max() - 1) < 0.05
    assert abs(h[np.triu_indices(512, 1)].mean()) < 3 / (2 * np.sqrt(512)) / np.sqrt(512 * 511 / 2)
    hist, edges = np.histogram(ev, bins=10, range=(-1, 1))
    mid = (edges[:-1] + edges[1:]) / 2
    expected = 512 * (2 / np.pi) * np.sqrt(1 - mid**2) * 0.2
    assert np.all(np.abs(hist - expected) < 4 * np.sqrt(expected) + 4)


def test_spec_validation():
    with pytest.raises(MalformedInputError):
        E.EnsembleSpec("gue", 0)
    with pytest.raises(ValueError):
        E.EnsembleSpec("poisson", 2)


# teleportation channel


@given(st.floats(0, 8), st.floats(0, 8), st.floats(-np.pi, np.pi))
def test_master_reduces_to_infinite_temperature(tl, tr, g):
    assert abs(E.lambda_master(0.0, tl, tr, g) - E.lambda_infT(tl, tr, g)) < 1e-10


def test_lambda_vanishes_at_zero_time():
    assert abs(E.lambda_master(1.3, 0, 0, np.pi)) < 1e-14
    assert E.lambda_sametime(0.0, 2.0) == pytest.approx(0.0, abs=1e-15)


def test_plateau_value_and_onset():
    assert E.lambda_sametime(30.0, np.pi) == pytest.approx(1.0, abs=1e-3)
    assert E.lambda_master(0.0, 40.0, 40.0, np.pi) == pytest.approx(1.0, abs=1e-3)
    assert 2.4 <= E.plateau_onset(np.pi) <= 3.0


@given(st.floats(-6, 6), st.floats(-6, 6), st.floats(0, 3))
def test_infinite_temperature_time_reversal(tl, tr, g):
    assert E.lambda_master(0.0, -tl, -tr, g) == pytest.approx(E.lambda_master(0.0, tl, tr, g), abs=1e-12)


@given(st.floats(0, 4), st.floats(0, 6), st.floats(-np.pi, np.pi))
def test_finite_n_tends_to_master(beta, t, g):
    assert abs(E.finite_n_lambda(beta, t, t, g, 10**7) - E.lambda_master(beta, t, t, g)) < 1e-6


def test_finite_n_vanishes_at_zero_coupling():
    assert E.finite_n_lambda(0.5, 3, 3, 0.0, 7) == pytest.approx(0.0, abs=1e-14)
    assert E.lambda_master(0.5, 3, 3, 0.0) == pytest.approx(0.0, abs=1e-14)


# two-point functions


def test_form_one_at_zero_time():
    for beta in (0.0, 1.0, 5.0):
        for g in (0.3, np.pi):
            expected = np.exp(1j * g) * f(-beta / 2) ** 2 / f(-beta)
            assert E.twopoint_I_gue(beta, 0.0, g) == pytest.approx(expected, abs=1e-13)
    assert E.twopoint_I_gue(0.0, 2.0, 0.0) == pytest.approx(1.0, abs=1e-13)


def test_form_two_trivial_limits():
    assert E.twopoint_II_goe(0.0, 0.0, 0.0, 0.0) == pytest.approx(1.0, abs=1e-13)
    assert E.twopoint_II_goe(0.0, 1.5, 1.5, 0.0) == pytest.approx(1.0, abs=1e-13)


def _gue_winding_twopoint(n, samples, beta, t, grid, seed=5):
    spec = E.EnsembleSpec("gue", n, samples=samples, seed=seed)
    coupling = CouplingSpec.all_sites(n)
    z0 = PauliString.from_label("Z" + "I" * (n - 1))
    vals = []
    for h in E.iter_samples(spec):
        ev = Evolver(h)
        vals.append([size_generating_function(h, beta, z0, t, g, coupling, True, ev) for g in grid])
    v = np.array(vals)
    se = np.hypot(v.real.std(0, ddof=1), v.imag.std(0, ddof=1)) / np.sqrt(len(v))
    return v.mean(0), se


@pytest.mark.parametrize("t", [0.0, 3.0])
def test_form_one_against_gue_monte_carlo_infinite_temperature(t):
    n, grid = 6, np.array([0.0, np.pi / 2, np.pi])
    mean, se = _gue_winding_twopoint(n, 200, 0.0, t, grid)
    # the closed form's bulk branch carries no phase; a uniformly random
    # string at finite n carries the binomial average cos(g/n)^n.  At
    # intermediate times the non-delta weight sits on small strings and the
    # two-branch form does not apply at n=6, so only t=0 and late t are used.
    d = f(1j * t) ** 2 * f(-1j * t) ** 2
    expected = np.exp(1j * grid) * d + np.cos(grid / n) ** n * (1 - d)
    assert np.all(np.abs(mean - expected) <= 3 * se + 1e-12)


def test_form_one_against_gue_monte_carlo_finite_temperature():
    n, beta, t = 6, 2.0, 1.0
    grid = np.array([0.0, np.pi / 2, np.pi])
    mean, se = _gue_winding_twopoint(n, 200, beta, t, grid)
    b2 = -beta / 2
    d = f(1j * t + b2) ** 2 * f(-1j * t) ** 2
    expected = (np.exp(1j * grid) * d + np.cos(grid / n) ** n * (f(b2) ** 2 - d)) / f(-beta)
    # thermal bulk strings keep a sign tied to commuting with the probe on its
    # own site, which tilts their phase by at most 2 sin(g/n) of the bulk weight
    bulk = 1 - f(b2) ** 2 / f(-beta)
    assert abs(mean[0] - expected[0]) <= 3 * se[0]
    assert np.all(np.abs(mean - expected) <= 3 * se + 2 * np.sin(grid / n) * bulk)


# s-function


def test_s_function_first_cases():
    a, b = 0.4 + 1j, -0.2j
    assert E.s_function(a, b, "zero") == f(a + b) ** 2
    assert E.s_function(a, b, "equal-nonzero") == f(a) ** 2 * f(b) ** 2
    with pytest.raises(MalformedInputError):
        E.s_function(a, b, "one-zero")
    with pytest.raises(MalformedInputError):
        E.s_function(a, b, "bogus", 4)


def test_s_function_winding_delta_numerator():
    beta, t = 3.0, 1.2
    delta = f(1j * t - beta / 2) ** 2 * f(-1j * t) ** 2
    assert E.s_function(1j * t - beta / 2, -1j * t, "equal-nonzero") == pytest.approx(delta)


def test_classify_pair():
    lab = PauliString.from_label
    assert E.classify_pair(lab("II"), lab("II")) is E.PauliClass.BOTH_ZERO
    assert E.classify_pair(lab("XI"), lab("XI")) is E.PauliClass.EQUAL_NONZERO
    assert E.classify_pair(lab("II"), lab("ZI")) is E.PauliClass.ONE_ZERO
    assert E.classify_pair(lab("XI"), lab("IX")) is E.PauliClass.DISTINCT_COMMUTING
    assert E.classify_pair(lab("XI"), lab("ZI")) is E.PauliClass.DISTINCT_ANTICOMMUTING


@pytest.mark.slow
def test_s_function_against_gue_monte_carlo():
    n, d = 7, 128
    a, b = 0.5 + 1j, -0.3j
    pairs = {
        "equal-nonzero": ("X", "X"),
        "zero": ("I", "I"),
        "one-zero": ("I", "X"),
        "distinct-commuting": ("XI", "IX"),
        "distinct-anticommuting": ("X", "Z"),
    }
    mats = {k: [dense(PauliString.from_label(s.ljust(n, "I"))) for s in v] for k, v in pairs.items()}
    vals = {k: [] for k in pairs}
    for h in E.iter_samples(E.EnsembleSpec("gue", n, samples=300, seed=3)):
        w, v = np.linalg.eigh(h)
        ea = (v * np.exp(a * w)) @ v.conj().T
        eb = (v * np.exp(b * w)) @ v.conj().T
        for k, (pu, pv) in mats.items():
            vals[k].append(np.trace(ea @ pu @ eb @ pv) ** 2 / d**2)
    for k in pairs:
        x = np.array(vals[k])
        se = np.hypot(x.real.std(ddof=1), x.imag.std(ddof=1)) / np.sqrt(x.size)
        assert abs(x.mean() - E.s_function(a, b, k, d)) <= 3 * se, k


# winding size distribution


def test_winding_size_trivial_limits():
    n = 8
    start = E.winding_size_gue(3, n, 0.0, 0.0)
    assert start.q[3] == pytest.approx(1.0) and start.p[3] == pytest.approx(1.0)
    assert np.allclose(np.delete(start.q, 3), 0)
    late = E.winding_size_gue(3, n, 0.0, 40.0)
    assert late.p[3] < 1e-6 + late.p[6]
    assert late.mean() == pytest.approx(0.75 * n, abs=0.1)


def test_winding_delta_branch_is_complex_at_finite_temperature():
    n = 10
    dist = E.winding_size_gue(1, n, 20.0, 1.0)
    delta = f(1j - 10.0) ** 2 * f(-1j) ** 2 / f(-20.0)
    bulk_at_l1 = dist.q[1] - delta
    assert abs(np.imag(delta)) > 1e-3 * abs(delta)
    assert abs(np.imag(dist.q[1])) > 1e-3 * abs(dist.q[1])
    assert abs(bulk_at_l1) < abs(delta)


def test_sigma_rules():
    assert E.bulk_sigma(12) == pytest.approx(1.5)
    assert E.bulk_sigma(18, "sqrt-2n-over-3") == pytest.approx(2.0)
    assert E.bulk_sigma(12, "sqrt-3n-over-4") == pytest.approx(3.0)
    with pytest.raises(MalformedInputError):
        E.bulk_sigma(4, "wide")
