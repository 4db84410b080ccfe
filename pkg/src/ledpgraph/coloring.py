"""Private defective coloring driven by MAT.

Every vertex ``u`` keeps, for each color ``c`` in its palette, the number of
already-colored neighbors using ``c`` and checks it against a noisy threshold.
Once ``(u, c)`` announces "threshold exceeded", no neighbor of ``u`` may pick
``c`` afterwards. Vertices are colored greedily in the reverse of a private
low out-degree ordering, each taking the smallest color none of its neighbors
has banned.

Half the budget goes to the ordering and half to the color checks (one MAT
instance with sensitivity 1 over all ``(vertex, color)`` pairs).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, log_n
from .mat import MatConfig, MatState, Transcript
from .noise import NoiseSource
from .ordering import Ordering, dp_ordering, dp_ordering_low_rounds

COLOR_SENSITIVITY = 1.0


class PaletteExhausted(RuntimeError):
    pass


@dataclass
class Coloring:
    """Per-vertex colors (all >= 1) and the runs that produced them.

    Attributes:
        color: color of each vertex.
        ordering: the private ordering used (its transcript holds the
            ordering rounds).
        transcript: one MAT round per colored vertex.
        step: position of each vertex in the coloring sequence.
        palette_start: first color of each vertex's palette.
        counts_at_ban: ``count_u(c)`` when ``(u, c)`` was banned, flattened
            like the MAT coordinates; -1 where never banned.
    """

    color: np.ndarray
    ordering: Ordering
    transcript: Transcript
    step: np.ndarray
    palette_start: np.ndarray
    palette_size: int
    counts_at_ban: np.ndarray
    epsilon: float
    threshold: float

    @property
    def palette_bound(self) -> int:
        return len(np.unique(self.color))

    @property
    def round_count(self) -> int:
        ordering_rounds = self.ordering.transcript.round_count if self.ordering.transcript else 0
        return ordering_rounds + self.transcript.round_count

    def coordinate(self, u, c):
        """MAT coordinate of the pair (u, c)."""
        return np.asarray(u) * self.palette_size + (np.asarray(c) - self.palette_start[u])


@dataclass(frozen=True)
class DefectReport:
    defect: np.ndarray
    max_defect: int


def default_threshold(n: int, epsilon: float) -> float:
    return 100.0 * log_n(n) / epsilon


def defect_bound(n: int, epsilon: float) -> float:
    """160 ln n / eps."""
    return 160.0 * log_n(n) / epsilon


def _greedy(g: Graph, ordering: Ordering, palette_start: np.ndarray, epsilon: float, src: NoiseSource,
            threshold_override: float | None, literal_loop: bool) -> Coloring:
    n = g.n
    size = max(n, 1)
    thr = default_threshold(n, epsilon) if threshold_override is None else float(threshold_override)
    owner = np.repeat(np.arange(n, dtype=np.int64), size)
    sub = np.tile(np.arange(size, dtype=np.int64), n) + np.repeat(palette_start, size)
    if n == 0:
        raise ValueError("cannot color an empty vertex set")
    cfg = MatConfig(np.full(len(owner), thr), epsilon / 2.0, COLOR_SENSITIVITY)
    state = MatState(cfg, src, "color", owner=owner, sub=sub)
    counts = np.zeros(len(owner), dtype=np.int64)
    counts_at_ban = np.full(len(owner), -1, dtype=np.int64)
    color = np.zeros(n, dtype=np.int64)
    step = np.full(n, -1, dtype=np.int64)
    for s, v in enumerate(ordering.order[::-1].tolist()):
        nbrs = g.neighbors(v)
        base = palette_start[v]
        # neighbors sharing v's palette; only they hold counters for v's colors
        same = nbrs[palette_start[nbrs] == base]
        banned = (~state.active.reshape(n, size)[same]).any(axis=0)
        free = np.flatnonzero(~banned)
        if len(free) == 0:
            raise PaletteExhausted(f"vertex {v} has no free color left")
        c = int(base + free[0])
        color[v] = c
        step[v] = s
        coords = same * size + (c - base)
        counts[coords] += 1
        if literal_loop:
            ans = state.query(counts, label=f"v={v}")
        else:
            ans = state.query(counts, coords=coords, label=f"v={v}")
        crossed = np.flatnonzero(ans == 1)
        counts_at_ban[crossed] = counts[crossed]
    return Coloring(color, ordering, state.transcript, step, palette_start, size, counts_at_ban, epsilon, thr)


def dp_color(g: Graph, epsilon: float, src: NoiseSource, threshold_override: float | None = None,
             literal_loop: bool = False) -> Coloring:
    """Greedy coloring over the reverse of ``dp_ordering`` (run at eps/2), colors 1..n.

    Args:
        threshold_override: replaces the ``100 ln n / eps`` threshold.
        literal_loop: re-check every active ``(vertex, color)`` pair after each
            step instead of only the pairs whose count changed. Both modes
            release identically distributed answers; the default is far cheaper.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    ordering = dp_ordering(g, epsilon / 2.0, src)
    return _greedy(g, ordering, np.ones(g.n, dtype=np.int64), epsilon, src, threshold_override, literal_loop)


def dp_color_low_rounds(g: Graph, epsilon: float, eta: float, src: NoiseSource,
                        threshold_override: float | None = None, literal_loop: bool = False) -> Coloring:
    """Greedy coloring over the reverse level-sorted ordering; level i uses colors n*i+1 .. n*(i+1)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not eta > 0:
        raise ValueError("eta must be positive")
    ordering = dp_ordering_low_rounds(g, epsilon / 2.0, eta, src)
    palette_start = ordering.cores.levels * g.n + 1
    return _greedy(g, ordering, palette_start, epsilon, src, threshold_override, literal_loop)


def defect_of(g: Graph, coloring) -> DefectReport:
    """Number of same-colored neighbors of every vertex."""
    color = coloring.color if isinstance(coloring, Coloring) else np.asarray(coloring, dtype=np.int64)
    if len(color) != g.n:
        raise ValueError("coloring must assign every vertex")
    if g.n and color.min() < 1:
        raise ValueError("uncolored vertex (colors start at 1)")
    src = np.repeat(np.arange(g.n), g.degrees)
    same = color[src] == color[g.indices]
    defect = np.bincount(src, weights=same, minlength=g.n).astype(np.int64)
    return DefectReport(defect, int(defect.max()) if g.n else 0)


def color_choice_violations(g: Graph, coloring: Coloring) -> list[int]:
    """Vertices that picked a color a neighbor had already banned, replayed from the transcript.

    Round ``s`` of the coloring transcript follows the ``s``-th coloring step, so
    a ban is visible to vertex ``v`` iff it was released in a round before ``step[v]``.
    """
    ban_round = coloring.transcript.crossing_round()
    bad = []
    for v in range(g.n):
        nbrs = g.neighbors(v)
        nbrs = nbrs[coloring.palette_start[nbrs] == coloring.palette_start[v]]
        r = ban_round[coloring.coordinate(nbrs, coloring.color[v])]
        if np.any((r >= 0) & (r < coloring.step[v])):
            bad.append(v)
    return bad


def color_bound(n: int, epsilon: float, degeneracy: int, low_rounds: bool = False, c: float = 4.0) -> float:
    """Calibrated color-count bound.

    ``c (1 + eps d / ln n)`` for the sequential variant and
    ``c (eps d ln n + ln^2 n)`` for the low-round one.
    """
    ln = log_n(n)
    if low_rounds:
        return c * (epsilon * degeneracy * ln + ln * ln)
    return c * (1.0 + epsilon * degeneracy / ln)


def coloring_report(g: Graph, coloring: Coloring, degeneracy: int, low_rounds: bool = False) -> dict:
    rep = defect_of(g, coloring)
    return {
        "colors": coloring.color.tolist(),
        "distinct_colors": coloring.palette_bound,
        "max_defect": rep.max_defect,
        "bound_rhs_colors": color_bound(g.n, coloring.epsilon, degeneracy, low_rounds),
        "bound_rhs_defect": defect_bound(g.n, coloring.epsilon),
    }
