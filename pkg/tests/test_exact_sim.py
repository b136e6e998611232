import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from sizewinding import ensembles as E
from sizewinding import exact_sim as S
from sizewinding import winding as W
from sizewinding.errors import DimensionError, MalformedInputError, ValidationError
from sizewinding.pauli import PauliString, all_paulis, dense


def gue(n, seed=2):
    return E.sample(E.EnsembleSpec("gue", n, seed=seed))


def goe(n, seed=2):
    return E.sample(E.EnsembleSpec("goe", n, seed=seed))


# thermofield double


def test_infinite_temperature_is_maximally_entangled():
    n = 3
    tfd = S.thermofield_double(gue(n), 0.0)
    assert np.allclose(tfd.as_matrix(n), np.eye(8) / np.sqrt(8))
    assert tfd.norm == pytest.approx(1.0)


def test_zero_temperature_is_ground_state_product():
    n = 2
    h = gue(n)
    e, v = np.linalg.eigh(h)
    m = S.thermofield_double(h, 400.0).as_matrix(n)
    ground = np.outer(v[:, 0], v[:, 0].conj())  # |E0>|E0*> has matrix psi psi^dag
    assert abs(abs(np.vdot(ground.reshape(-1), m.reshape(-1))) - 1) < 1e-9


def test_reduced_state_is_thermal():
    n, beta = 2, 1.0
    h = gue(n, seed=4)
    m = S.thermofield_double(h, beta).as_matrix(n)
    rho = expm(-beta * h)
    rho /= np.trace(rho)
    assert np.abs(m @ m.conj().T - rho).max() < 1e-9
    rho_r = expm(-beta * h.T)
    assert np.abs(m.T @ m.conj() - rho_r / np.trace(rho_r)).max() < 1e-9


def test_propagators_are_unitary():
    ev = S.Evolver(gue(4))
    u = ev.propagator(3.7)
    assert np.abs(u @ u.conj().T - np.eye(16)).max() < 1e-9


def test_non_hermitian_rejected():
    with pytest.raises(ValidationError):
        S.Evolver(np.array([[0, 1], [0, 0]], dtype=complex))


# coupling


def test_zero_coupling_is_identity():
    assert np.allclose(S.coupling_unitary(S.CouplingSpec.all_sites(3), 0.0), 1)


def test_single_pair_at_pi():
    spec = S.CouplingSpec(1, (0,))
    assert np.allclose(S.coupling_unitary(spec, np.pi), [-1, -1, -1, -1])
    assert np.allclose(S.coupling_unitary(spec, np.pi / 2), [1j, -1j, -1j, 1j])


def test_coupling_eigenvalue_on_epr_pauli_states():
    n = 3
    spec = S.CouplingSpec(n, (0, 2))
    g = 0.7
    zz = sum(np.kron(dense(PauliString.from_label(s)), dense(PauliString.from_label(s))) for s in ("ZII", "IIZ"))
    full = expm(1j * g * zz / spec.k)
    assert np.allclose(np.diag(full), S.coupling_unitary(spec, g))
    epr = np.eye(8).reshape(-1) / np.sqrt(8)
    for p in all_paulis(n):
        vec = np.kron(dense(p), np.eye(8)) @ epr
        assert np.allclose(full @ vec, spec.phase_of(p, g) * vec)


def test_coupling_validation():
    with pytest.raises(MalformedInputError):
        S.CouplingSpec(3, ())
    with pytest.raises(MalformedInputError):
        S.CouplingSpec(3, (3,))
    with pytest.raises(DimensionError):
        S.coupling_unitary(S.CouplingSpec.all_sites(2), 1.0, n=3)
    assert S.CouplingSpec.excluding_messages(4, (0, 2)).carriers == (1, 3)


# state transfer


@settings(max_examples=10)
@given(st.floats(0, 3), st.floats(0, 5), st.floats(-np.pi, np.pi))
def test_channel_is_physical(beta, t, g):
    h = goe(3, seed=1)
    ch = S.state_transfer_channel(h, beta, t, t, g, S.CouplingSpec.all_sites(3))
    assert ch.trace_error < 1e-9
    assert ch.cp_residual > -1e-9


def test_no_transfer_without_coupling():
    ch = S.state_transfer_channel(goe(5), 0.0, 6.0, 6.0, 0.0, S.CouplingSpec.excluding_messages(5))
    assert abs(ch.lam) < 0.1


def test_transfer_requires_single_qubit():
    with pytest.raises(MalformedInputError):
        S.state_transfer_channel(goe(2), 0.0, 1.0, 1.0, 1.0, S.CouplingSpec.all_sites(2), m=2)


def test_zero_time_has_no_signal():
    ch = S.state_transfer_channel(goe(3), 0.0, 0.0, 0.0, np.pi, S.CouplingSpec.all_sites(3))
    assert abs(ch.lam) < 1e-12


# two-point functions


@pytest.mark.parametrize("form", ["I", "II"])
def test_two_point_normalized_at_zero_coupling(form):
    n = 4
    h = gue(n)
    z = PauliString.from_label("ZIII")
    for t in (0.0, 1.0, 5.0):
        val = S.two_point(h, 0.0, t, t, 0.0, S.CouplingSpec.all_sites(n), z, form=form)
        assert abs(val - 1) < 1e-9


def test_winding_sum_is_time_independent():
    n, beta = 4, 2.0
    h = gue(n)
    x = PauliString.from_label("XIII")
    spec = S.CouplingSpec.all_sites(n)
    vals = [S.size_generating_function(h, beta, x, t, 0.0, spec) for t in (0.0, 0.8, 3.0, 9.0)]
    assert np.abs(np.array(vals) - vals[0]).max() < 1e-9


def test_two_point_form_validation():
    with pytest.raises(MalformedInputError):
        S.two_point(gue(2), 0.0, 1.0, 1.0, 1.0, S.CouplingSpec.all_sites(2), PauliString.from_label("XI"), form="III")
    with pytest.raises(DimensionError):
        S.two_point(gue(2), 0.0, 1.0, 1.0, 1.0, S.CouplingSpec.all_sites(2), PauliString.from_label("X"))


@pytest.mark.parametrize("beta", [0.0, 1.5])
def test_fourier_link_to_pauli_expansion(beta):
    n, t = 4, 1.3
    h = gue(n)
    p = PauliString.from_label("XIII")
    spec = S.CouplingSpec.all_sites(n)
    dist = W.distributions_from_coefficients(W.pauli_coefficients(h, beta, p, t), "xy_weight", spec.mask)
    w = np.arange(n + 1)
    for g in W.fourier_grid(n):
        dft = dist.norm * np.sum(dist.q * np.exp(1j * g * (n - 2 * w) / n))
        # the winding form sees the left side evolve with H^T
        assert abs(S.two_point(h.T, beta, t, t, g, spec, p) - dft) < 1e-8


# response


def test_response_vanishes_without_dynamics_or_coupling():
    n = 3
    phi = PauliString.from_label("ZII")
    spec = S.CouplingSpec.all_sites(n)
    assert abs(S.commutator_response(goe(n), 0.0, 0.0, 0.0, spec, phi)) < 1e-12
    assert abs(S.operator_transfer_response(goe(n), 0.0, 0.0, 0.0, spec, phi)) < 1e-9


@pytest.mark.parametrize("g", [-1.5, 0.7, 2.5])
def test_response_matches_commutator(g):
    n = 4
    h = goe(n, seed=6)
    phi = PauliString.from_label("XIII")
    spec = S.CouplingSpec.excluding_messages(n)
    direct = S.commutator_response(h, 1.0, 2.0, g, spec, phi)
    finite = S.operator_transfer_response(h, 1.0, 2.0, g, spec, phi, epsilon=1e-4)
    assert abs(direct - finite) < 1e-6


def test_response_is_asymmetric_in_coupling_at_low_temperature():
    n = 4
    h = goe(n, seed=6) * 4
    phi = PauliString.from_label("XIII")
    spec = S.CouplingSpec.excluding_messages(n)
    plus = S.commutator_response(h, 5.0, 2.0, 1.5, spec, phi)
    minus = S.commutator_response(h, 5.0, 2.0, -1.5, spec, phi)
    assert abs(plus - minus) > 1e-3


# measurement protocol


def test_measurement_collapses_epr_at_infinite_temperature():
    n = 3
    h = gue(n)
    out = S.measurement_based_transfer(h, 0.0, 0.7, 0.0, outcome=5)
    expected = np.zeros(8)
    expected[5] = 1
    assert out.probability == pytest.approx(1 / 8)
    assert np.allclose(out.right_state.amplitudes, expected)


def test_measurement_without_coupling_is_plain_evolution():
    n, t = 2, 1.1
    h = gue(n)
    out = S.measurement_based_transfer(h, 0.0, 0.0, t, outcome=2)
    start = np.zeros(4)
    start[2] = 1
    assert np.allclose(out.right_state.amplitudes, expm(-1j * h.T * t) @ start)


def test_measurement_signal_needs_coupling():
    n = 4
    h = goe(n) * 4
    msg = obs = PauliString.from_label("XIII")

    def signal(mu):
        with_msg = S.measurement_signal(h, 0.0, mu, 1.0, obs, message=msg, t_insert=1.0)
        return with_msg - S.measurement_signal(h, 0.0, mu, 1.0, obs)

    assert abs(signal(0.0)) < 1e-12
    assert max(abs(signal(mu)) for mu in (0.5, 1.0, 4.0)) > 0.05
