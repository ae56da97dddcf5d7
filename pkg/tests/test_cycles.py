import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dwellgraph.cycles import (MEAN, RATIO, best_by_enumeration, canonical_cycle,
                               enumerate_cycles, max_cycle_mean, max_cycle_ratio,
                               positive_cycle_exists, strongly_connected_components)
from dwellgraph.errors import NonPositiveLoss, TooLarge
from dwellgraph.graph import Edge, SwitchingGraph

from systems import random_weighted_graph


def _graph(m, weights):
    return SwitchingGraph.from_weights(m, weights)


def test_two_cycle():
    g = _graph(2, {(0, 1): (1.0, 0.5), (1, 0): (1.0, 0.5)})
    cert = max_cycle_ratio(g)
    assert cert.cycle == (0, 1)
    assert cert.value == pytest.approx(2.0, abs=1e-12)


def test_ratio_prefers_better_cycle():
    g = _graph(3, {(0, 1): (1.0, 1.0), (1, 0): (1.0, 1.0),
                   (1, 2): (3.0, 1.0), (2, 1): (3.0, 1.0)})
    cert = max_cycle_ratio(g)
    assert cert.cycle == (1, 2) and cert.value == pytest.approx(3.0)


def test_acyclic():
    g = _graph(3, {(0, 1): (1.0, 1.0), (1, 2): (1.0, 1.0)})
    assert strongly_connected_components(g) == []
    assert enumerate_cycles(g) == []
    assert max_cycle_ratio(g) is None
    assert max_cycle_mean(g) is None


def test_negative_gains():
    g = _graph(2, {(0, 1): (-1.0, 0.5), (1, 0): (-2.0, 1.0)})
    cert = max_cycle_ratio(g)
    assert cert.value == pytest.approx(-2.0)
    assert max_cycle_mean(g).value == pytest.approx(-1.5)


def test_mean_vs_ratio_critical_cycles_differ():
    # long cycle wins the mean, short heavy-loss cycle loses the ratio
    g = _graph(3, {(0, 1): (2.0, 0.1), (1, 0): (2.0, 10.0),
                   (1, 2): (1.0, 0.1), (2, 0): (1.0, 0.1)})
    assert max_cycle_mean(g).cycle == (0, 1)
    assert max_cycle_ratio(g).cycle == (0, 1, 2)


def test_non_positive_loss_rejected():
    g = _graph(2, {(0, 1): (1.0, 0.0), (1, 0): (1.0, 1.0)})
    with pytest.raises(NonPositiveLoss):
        max_cycle_ratio(g)


def test_enumerate_counts_complete_graph():
    # K4 has 6 two-cycles, 8 three-cycles and 6 four-cycles
    m = 4
    g = _graph(m, {(i, j): (1.0, 1.0) for i in range(m) for j in range(m) if i != j})
    cycles = enumerate_cycles(g)
    assert len(cycles) == 20
    assert len(set(cycles)) == 20
    assert all(c == canonical_cycle(c) for c in cycles)


def test_enumeration_guard():
    g = _graph(11, {(i, (i + 1) % 11): (1.0, 1.0) for i in range(11)})
    with pytest.raises(TooLarge):
        enumerate_cycles(g)


def test_positive_cycle_oracle():
    g = _graph(2, {(0, 1): (1.0, 0.5), (1, 0): (1.0, 0.5)})
    assert positive_cycle_exists(g, 1.9) == (0, 1)
    assert positive_cycle_exists(g, 2.1) is None


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_matches_enumeration(m, seed):
    g = random_weighted_graph(m, np.random.default_rng(seed))
    for kind, fn in ((RATIO, max_cycle_ratio), (MEAN, max_cycle_mean)):
        oracle = best_by_enumeration(g, kind)
        cert = fn(g)
        if oracle is None:
            assert cert is None
            continue
        assert abs(cert.value - oracle.value) <= 1e-9
        assert cert.recompute(g) == pytest.approx(cert.value, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31 - 1), st.floats(0.1, 10.0))
def test_scaling(m, seed, c):
    g = random_weighted_graph(m, np.random.default_rng(seed))
    scaled = SwitchingGraph(m, tuple(Edge(e.i, e.j, c * e.w_plus, e.w_minus) for e in g.edges))
    a, b = max_cycle_ratio(g), max_cycle_ratio(scaled)
    if a is None:
        assert b is None
    else:
        assert b.value == pytest.approx(c * a.value, abs=1e-8 * max(1, c))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_monotone_under_edge_removal(m, seed):
    rng = np.random.default_rng(seed)
    g = random_weighted_graph(m, rng, p=0.7)
    keep = tuple(e for e in g.edges if rng.random() < 0.7)
    sub = SwitchingGraph(m, keep)
    for fn in (max_cycle_ratio, max_cycle_mean):
        full, part = fn(g), fn(sub)
        if part is not None:
            assert part.value <= full.value + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_bisection_soundness(m, seed):
    # a positive cycle exists just below the optimum and none just above it
    g = random_weighted_graph(m, np.random.default_rng(seed))
    cert = max_cycle_ratio(g)
    if cert is None:
        return
    assert positive_cycle_exists(g, cert.value - 1e-6) is not None
    assert positive_cycle_exists(g, cert.value + 1e-6) is None
