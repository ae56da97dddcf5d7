import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dwellgraph import catalog
from dwellgraph.dwell import min_dwell_nondefective, nondefective_forms
from dwellgraph.errors import DimensionMismatch, SignalNotAdmissible
from dwellgraph.graph import Adjacency, fully_connected, ring
from dwellgraph.simulation import (AVG_DWELL, MIN_DWELL, SwitchingSignal, cycle_signal,
                                   empirical_decay, generate_signal, simulate,
                                   validate_signal, verify_bound)

from systems import stable_matrix


def test_mode_sequence_and_counts():
    sig = SwitchingSignal((0, 3, 5), (0, 1, 0), 8)
    assert sig.mode_sequence().tolist() == [0, 0, 0, 1, 1, 0, 0, 0]
    assert sig.n_switches == 2
    assert [sig.switch_count(t) for t in (0, 2, 3, 4, 5, 7)] == [0, 0, 1, 1, 2, 2]


def test_validator_min_dwell():
    adj = fully_connected(2)
    validate_signal(SwitchingSignal((0, 3, 6), (0, 1, 0), 10), adj, 3)
    with pytest.raises(SignalNotAdmissible):
        validate_signal(SwitchingSignal((0, 3, 5), (0, 1, 0), 10), adj, 3)


def test_validator_rejects_non_edges():
    with pytest.raises(SignalNotAdmissible):
        validate_signal(SwitchingSignal((0, 5), (1, 0), 10), ring(3), 1)
    with pytest.raises(SignalNotAdmissible):
        validate_signal(SwitchingSignal((0, 5), (0, 0), 10), fully_connected(2), 1)


def test_validator_average_dwell():
    adj = fully_connected(2)
    # N0 = 1, tau = 4: one switch is free, the next needs t >= 4
    validate_signal(SwitchingSignal((0, 1, 4), (0, 1, 0), 10), adj, 4, AVG_DWELL, 1)
    with pytest.raises(SignalNotAdmissible):
        validate_signal(SwitchingSignal((0, 1, 3), (0, 1, 0), 10), adj, 4, AVG_DWELL, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(1, 6), st.integers(0, 3), st.integers(0, 2**31 - 1),
       st.sampled_from([MIN_DWELL, AVG_DWELL]))
def test_generated_signals_are_admissible(m, tau, n0, seed, mode):
    adj = ring(m, two_sided=seed % 2 == 0)
    sig = generate_signal(adj, mode, tau, n0, horizon=60, seed=seed)
    validate_signal(sig, adj, tau, mode, n0)
    assert sig.switch_times[-1] < 60


def test_generation_reproducible():
    adj = fully_connected(4)
    a = generate_signal(adj, MIN_DWELL, 3, horizon=200, seed=9)
    b = generate_signal(adj, MIN_DWELL, 3, horizon=200, seed=9)
    assert a == b


def test_simulate_single_mode():
    A = np.diag([0.5, 0.25])
    traj = simulate([A], SwitchingSignal((0,), (0,), 4), np.array([1.0, 1.0]))
    assert np.allclose(traj.states[-1], [0.5 ** 4, 0.25 ** 4])
    assert traj.norms[0] == pytest.approx(np.sqrt(2))


def test_simulate_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        simulate([np.eye(2) * 0.5], SwitchingSignal((0,), (0,), 3), np.ones(3))


def test_cycle_signal():
    sig = cycle_signal((0, 2, 1), 3, 12)
    assert sig.switch_times == (0, 3, 6, 9)
    assert sig.modes == (0, 2, 1, 0)


def test_verify_bound_holds_at_certified_dwell():
    mats, adjs = catalog.get_example("example1")
    forms = nondefective_forms(mats)
    tau = min_dwell_nondefective(forms, adjs["G1"]).tau_int
    rng = np.random.default_rng(1)
    for seed in range(20):
        sig = generate_signal(adjs["G1"], MIN_DWELL, tau, horizon=300, seed=seed)
        traj = simulate(mats, sig, rng.standard_normal(3))
        check = verify_bound(forms, sig, traj, tau)
        assert check.ok and np.all(check.margins >= 0)


def test_verify_bound_flags_wrong_gamma():
    mats, adjs = catalog.get_example("example1")
    forms = nondefective_forms(mats)
    sig = generate_signal(adjs["G1"], MIN_DWELL, 7, horizon=100, seed=0)
    traj = simulate(mats, sig, np.ones(3))
    assert verify_bound(forms, sig, traj, 7, gamma=1e-3).violations > 0


def test_verify_bound_rejects_short_dwell():
    mats = [stable_matrix(2, np.random.default_rng(k)) for k in range(2)]
    forms = nondefective_forms(mats)
    sig = SwitchingSignal((0, 2), (0, 1), 6)
    with pytest.raises(SignalNotAdmissible):
        verify_bound(forms, sig, simulate(mats, sig, np.ones(2)), 3)


def test_empirical_decay_reproducible_and_certified():
    mats, adjs = catalog.get_example("example1")
    forms = nondefective_forms(mats)
    a = empirical_decay(mats, adjs["G2"], 5, trials=50, seed=42, forms=forms)
    b = empirical_decay(mats, adjs["G2"], 5, trials=50, seed=42, forms=forms)
    assert a.to_dict() == b.to_dict()
    assert a.violations == 0 and a.max_ratio < 1e-6
    c = empirical_decay(mats, adjs["G2"], 5, trials=50, seed=43, forms=forms)
    assert c.to_dict() != a.to_dict()


def test_empirical_decay_average_mode():
    mats, adjs = catalog.get_example("example1")
    stats = empirical_decay(mats, adjs["G1"], 7, trials=20, seed=0, mode=AVG_DWELL, n0=2)
    assert stats.trials == 20 and stats.max_ratio < 1e-6


def test_empirical_decay_adversarial():
    mats, adjs = catalog.get_example("example1")
    stats = empirical_decay(mats, adjs["G1"], 7, trials=5, seed=0,
                            adversarial_cycle=(0, 1, 2, 3))
    assert stats.max_ratio < 1e-6


def test_empirical_decay_needs_trials():
    with pytest.raises(ValueError):
        empirical_decay([np.eye(2) * 0.5], Adjacency(1, []), 1, trials=0)
