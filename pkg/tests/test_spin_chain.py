import warnings

import numpy as np
import pytest

from sizewinding import spin_chain as sc
from sizewinding.errors import MalformedInputError, ResourceLimitError

# light-cone predictions


def test_identity_prediction_is_delta_at_zero():
    d = sc.lightcone_size_prediction(0, 1.0, 5.0, n=10)
    assert d.p[0] == 1 and d.p.sum() == 1


def test_prediction_is_linear_in_initial_size():
    d = sc.lightcone_size_prediction(2, 1.0, 4.0, n=20)
    assert d.p[12] == 1
    assert d.meta["predicted_size"] == pytest.approx(3 * 1.0 * 4.0)
    assert sc.lightcone_size_prediction(1, 1.0, 4.0).meta["predicted_size"] == pytest.approx(6.0)


def test_odd_multiple_of_pi_gives_alternating_sign():
    n, v_b, t = 10, 1.0, 5.0
    g = np.pi * n / (2 * v_b * t)
    for l0 in range(5):
        assert sc.predicted_twopoint(l0, g, n, v_b, t) == pytest.approx((-1) ** l0)


def test_phase_matched_coupling():
    assert sc.phase_matched_coupling(10, 5) == pytest.approx(2 * np.pi)
    with pytest.raises(MalformedInputError):
        sc.phase_matched_coupling(10, 0)


def test_lightcone_front_moves_one_site_per_layer():
    assert sc.lightcone_sites(12, [6], 0) == {6}
    widths = [len(sc.lightcone_sites(40, [20], t)) for t in range(1, 9)]
    # one site per layer on each side
    assert np.all(np.diff(widths) == 2 * sc.V_BUTTERFLY)


# Pauli-basis size distributions


def test_zero_depth_is_delta_at_initial_size():
    d = sc.empirical_size_distribution(sc.BrickworkSpec(6, 0), l0=2)
    assert d.p[2] == pytest.approx(1.0)


def test_support_stays_inside_lightcone():
    d = sc.empirical_size_distribution(sc.BrickworkSpec(8, 3, seed=2, samples=2), l0=1)
    assert d.meta["weight_outside_lightcone"] < 1e-20
    assert d.p.sum() == pytest.approx(1.0)
    assert np.allclose(d.q, d.p)


def test_deep_circuit_mean_size():
    n = 10
    d = sc.empirical_size_distribution(sc.BrickworkSpec(n, 20, seed=1, samples=2), l0=1)
    assert d.mean() == pytest.approx(0.75 * min(2 * 20, n), abs=0.1)


def test_width_grows_before_saturation():
    widths = [sc.empirical_size_distribution(sc.BrickworkSpec(10, t, seed=1), l0=1).std() for t in (1, 2, 3)]
    assert widths[0] < widths[1] < widths[2]


def test_size_distribution_limits():
    with pytest.raises(ResourceLimitError):
        sc.empirical_size_distribution(sc.BrickworkSpec(13, 1))
    with pytest.raises(MalformedInputError):
        sc.empirical_size_distribution(sc.BrickworkSpec(4, 1), l0=5)


# state transfer


def test_no_coupling_gives_maximally_mixed_baseline():
    r = sc.simulate_chain_transfer(sc.BrickworkSpec(6, 3, seed=1, samples=2), 1, g=0.0)
    assert r.fidelities[0] == pytest.approx(0.25, abs=1e-10)


def test_zero_depth_passes_nothing_through():
    # without scrambling the message never reaches the right side
    r = sc.simulate_chain_transfer(sc.BrickworkSpec(4, 0), 1, g=np.pi)
    assert r.cone_sizes == (1,)
    assert r.lam[0] == pytest.approx(0.0, abs=1e-12)
    assert r.fidelities[0] == pytest.approx(0.25, abs=1e-12)


def test_separated_messages_beat_adjacent_ones():
    spec = sc.BrickworkSpec(8, 2, seed=3, samples=3)
    g = np.pi * 8 / 5
    far = sc.simulate_chain_transfer(spec, 2, g=g, message_sites=(1, 6))
    assert far.separated
    with pytest.warns(sc.SeparationWarning):
        near = sc.simulate_chain_transfer(spec, 2, g=g, message_sites=(3, 4))
    assert not near.separated
    assert far.mean_fidelity > near.mean_fidelity


def test_transfer_validation():
    spec = sc.BrickworkSpec(4, 1)
    with pytest.raises(MalformedInputError):
        sc.simulate_chain_transfer(spec, 2, message_sites=(1, 1))
    with pytest.raises(ResourceLimitError):
        sc.simulate_chain_transfer(sc.BrickworkSpec(12, 1))
    with pytest.raises(MalformedInputError):
        sc.BrickworkSpec(1, 1)


def test_default_sites_are_block_centres():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sc.SeparationWarning)
        r = sc.simulate_chain_transfer(sc.BrickworkSpec(6, 1), 2)
    assert r.message_sites == (1, 4)
