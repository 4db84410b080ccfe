import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ledpgraph import graph as G
from ledpgraph import kcore
from ledpgraph import ordering as O
from ledpgraph.noise import NoiseSource

from .conftest import random_graph
from .test_graph import graphs


def test_k4_outdegrees():
    rep = O.orientation_outdegrees(G.clique(4), [2, 0, 3, 1])
    assert rep.out_degree[[2, 0, 3, 1]].tolist() == [3, 2, 1, 0]
    assert rep.max_out_degree == 3


def test_path_outdegrees():
    assert O.orientation_outdegrees(G.path(4), [0, 1, 2, 3]).out_degree.tolist() == [1, 1, 1, 0]


@pytest.mark.parametrize("order", [[0, 1, 2], [0, 1, 1, 2], [0, 1, 5, 2]])
def test_not_a_permutation(order):
    with pytest.raises(ValueError):
        O.orientation_outdegrees(G.path(4), order)


@settings(max_examples=50, deadline=None)
@given(g=graphs(max_n=15), seed=st.integers(0, 2**31))
def test_outdegrees_sum_to_m(g, seed):
    order = np.random.default_rng(seed).permutation(g.n)
    assert O.orientation_outdegrees(g, order).out_degree.sum() == g.m


def test_zero_noise_path():
    g = G.path(5)
    o = O.dp_ordering(g, 1.0, NoiseSource.zero())
    assert o.is_permutation(5)
    assert O.orientation_outdegrees(g, o).max_out_degree <= 2


def test_removal_order_with_small_step():
    g = G.disjoint_union(G.clique(6), G.path(4))
    o = O.dp_ordering(g, 1.0, NoiseSource.zero(), step_size=1.0)
    # the path goes first (threshold 1), its ends before its middle
    assert o.order[:4].tolist() == [6, 9, 7, 8]
    assert O.removal_consistency_violations(g, o) == []


@pytest.mark.parametrize("seed", range(5))
def test_removal_consistency(seed):
    g = random_graph(np.random.default_rng(seed), 150, 0.1)
    o = O.dp_ordering(g, 2.0, NoiseSource(seed), constant_c=1.0)
    assert o.is_permutation(g.n)
    assert (o.cores.removal_degree >= 0).sum() > 0
    assert O.removal_consistency_violations(g, o) == []


def test_low_rounds_sorted_by_level_then_id():
    g = G.disjoint_union(G.empty(4), G.clique(25))
    o = O.dp_ordering_low_rounds(g, 1.0, 1.0, NoiseSource(3))
    levels = o.cores.levels[o.order]
    assert np.all(np.diff(levels) >= 0)
    for lvl in np.unique(levels):
        assert np.all(np.diff(o.order[levels == lvl]) > 0)
    assert o.transcript.round_count <= kcore.round_bound(g.n)


def test_low_rounds_isolated_vertices_first():
    g = G.disjoint_union(G.empty(4), G.clique(25))
    o = O.dp_ordering_low_rounds(g, 1.0, 1.0, NoiseSource.zero())
    assert o.order[:4].tolist() == [0, 1, 2, 3]


def test_low_rounds_is_reproducible():
    g = random_graph(np.random.default_rng(1), 100, 0.1)
    a = O.dp_ordering_low_rounds(g, 1.0, 1.0, NoiseSource(8))
    b = O.dp_ordering_low_rounds(g, 1.0, 1.0, NoiseSource(8))
    assert a.order.tobytes() == b.order.tobytes()


def test_removal_consistency_needs_removal_order():
    g = G.path(4)
    o = O.dp_ordering_low_rounds(g, 1.0, 1.0, NoiseSource(0))
    with pytest.raises(ValueError):
        O.removal_consistency_violations(g, o)


def test_report_fields():
    g = G.clique(5)
    o = O.dp_ordering(g, 1.0, NoiseSource(1))
    rep = O.ordering_report(g, o)
    assert set(rep) == {"order", "out_degrees", "max_out_degree", "degeneracy", "bound_rhs"}
    assert rep["degeneracy"] == 4
    assert rep["bound_rhs"] == pytest.approx(4 + 120 * np.log(5))
    low = O.ordering_report(g, O.dp_ordering_low_rounds(g, 1.0, 0.5, NoiseSource(1)))
    assert low["bound_rhs"] == pytest.approx(2.5 * 4 + 240 * np.log(5))
