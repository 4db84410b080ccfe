import numpy as np
import pytest

from ledpgraph import coloring as C
from ledpgraph import graph as G
from ledpgraph.noise import NoiseSource

from .conftest import random_graph


def test_single_vertex():
    col = C.dp_color(G.empty(1), 1.0, NoiseSource(0))
    assert col.color.tolist() == [1]


@pytest.mark.parametrize("n", [3, 5, 8])
def test_clique_threshold_one_is_proper(n):
    g = G.clique(n)
    col = C.dp_color(g, 1.0, NoiseSource.zero(), threshold_override=1)
    assert col.palette_bound == n
    assert C.defect_of(g, col).max_defect == 0


def _greedy_oracle(g, order, threshold):
    """Zero-noise reference: color c is banned for v once some neighbor u has
    at least ``threshold`` neighbors colored c."""
    color = {}
    counts = {}
    for v in order:
        banned = {c for u in g.neighbors(v).tolist() for c, k in counts.get(u, {}).items() if k >= threshold}
        c = 1
        while c in banned:
            c += 1
        color[v] = c
        for u in g.neighbors(v).tolist():
            counts.setdefault(u, {})
            counts[u][c] = counts[u].get(c, 0) + 1
    return [color[v] for v in range(g.n)]


@pytest.mark.parametrize("seed,threshold", [(0, 1), (1, 2), (2, 3), (3, 5)])
def test_zero_noise_matches_greedy_oracle(seed, threshold):
    g = random_graph(np.random.default_rng(seed), 40, 0.25)
    col = C.dp_color(g, 1.0, NoiseSource.zero(), threshold_override=threshold)
    expected = _greedy_oracle(g, col.ordering.order[::-1].tolist(), threshold)
    assert col.color.tolist() == expected


def test_edge_threshold_one_shares_a_color():
    # a ban on (u, c) only stops u's neighbors; v never consults its own counter,
    # so on a single edge the second vertex still takes color 1
    col = C.dp_color(G.clique(2), 1.0, NoiseSource.zero(), threshold_override=1)
    assert col.color.tolist() == [1, 1]
    assert C.defect_of(G.clique(2), col).max_defect == 1


def test_threshold_one_bans_colors_at_distance_two():
    # on the path 0-1-2 vertex 2 goes first; once 1 also takes color 1, the
    # counter (1, 1) crosses and bans color 1 for vertex 0, which has no
    # neighbor of color 1 itself
    g = G.path(3)
    col = C.dp_color(g, 1.0, NoiseSource.zero(), threshold_override=1)
    assert col.ordering.order[::-1].tolist() == [2, 1, 0]
    assert col.color.tolist() == [2, 1, 1]


@pytest.mark.parametrize("low", [False, True])
def test_literal_loop_is_identical_without_noise(low):
    g = random_graph(np.random.default_rng(3), 35, 0.3)
    kw = dict(threshold_override=3)
    if low:
        a = C.dp_color_low_rounds(g, 1.0, 1.0, NoiseSource.zero(), **kw)
        b = C.dp_color_low_rounds(g, 1.0, 1.0, NoiseSource.zero(), literal_loop=True, **kw)
    else:
        a = C.dp_color(g, 1.0, NoiseSource.zero(), **kw)
        b = C.dp_color(g, 1.0, NoiseSource.zero(), literal_loop=True, **kw)
    assert a.color.tolist() == b.color.tolist()
    assert a.transcript.to_dict() == b.transcript.to_dict()


def test_literal_loop_with_noise_runs():
    g = random_graph(np.random.default_rng(4), 25, 0.3)
    col = C.dp_color(g, 4.0, NoiseSource(2), threshold_override=25, literal_loop=True)
    assert C.color_choice_violations(g, col) == []


def test_bans_require_mass_without_noise():
    g = random_graph(np.random.default_rng(5), 60, 0.3)
    col = C.dp_color(g, 1.0, NoiseSource.zero(), threshold_override=4)
    banned = col.counts_at_ban[col.counts_at_ban >= 0]
    assert len(banned) > 0
    assert banned.min() >= 4


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("low", [False, True])
def test_color_choice_validity(seed, low):
    g = random_graph(np.random.default_rng(seed), 80, 0.2)
    src = NoiseSource(seed)
    if low:
        col = C.dp_color_low_rounds(g, 4.0, 1.0, src, threshold_override=6)
    else:
        col = C.dp_color(g, 4.0, src, threshold_override=6)
    assert C.color_choice_violations(g, col) == []
    assert np.all(C.defect_of(g, col).defect <= g.degrees)


def test_low_rounds_palettes_are_disjoint():
    g = random_graph(np.random.default_rng(6), 80, 0.15)
    col = C.dp_color_low_rounds(g, 1.0, 1.0, NoiseSource(6))
    levels = col.ordering.cores.levels
    lo, hi = levels * g.n + 1, (levels + 1) * g.n
    assert np.all((col.color >= lo) & (col.color <= hi))
    for a, b in g.edges().tolist():
        if levels[a] != levels[b]:
            assert col.color[a] != col.color[b]


def test_round_count_adds_ordering_and_coloring():
    g = random_graph(np.random.default_rng(1), 60, 0.1)
    col = C.dp_color_low_rounds(g, 1.0, 1.0, NoiseSource(1))
    assert col.round_count == col.ordering.transcript.round_count + g.n


def test_defect_examples():
    assert C.defect_of(G.clique(4), [1, 1, 1, 1]).defect.tolist() == [3, 3, 3, 3]
    assert C.defect_of(G.clique(4), [1, 2, 3, 4]).max_defect == 0
    rep = C.defect_of(G.star(5), [7] * 6)
    assert rep.defect.tolist() == [5, 1, 1, 1, 1, 1]
    with pytest.raises(ValueError):
        C.defect_of(G.path(3), [1, 0, 1])
    with pytest.raises(ValueError):
        C.defect_of(G.path(3), [1, 1])


def test_invalid_parameters():
    with pytest.raises(ValueError):
        C.dp_color(G.path(3), 0.0, NoiseSource(0))
    with pytest.raises(ValueError):
        C.dp_color_low_rounds(G.path(3), 1.0, -1.0, NoiseSource(0))


def test_report_fields():
    g = G.clique(6)
    col = C.dp_color(g, 1.0, NoiseSource(0))
    rep = C.coloring_report(g, col, degeneracy=5)
    assert set(rep) == {"colors", "distinct_colors", "max_defect", "bound_rhs_colors", "bound_rhs_defect"}
    assert rep["bound_rhs_defect"] == pytest.approx(160 * np.log(6))
