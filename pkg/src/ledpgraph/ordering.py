"""Private low out-degree vertex orderings.

An ordering orients every edge from its earlier endpoint to its later one.
Two private orderings are built on the k-core runs:

* ``dp_ordering`` appends vertices in the order additive peeling removes them;
* ``dp_ordering_low_rounds`` sorts vertices by their final level in the
  level-based run, ties by id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, graph_stats, log_n
from .kcore import CoreEstimates, PeelConfig, dp_core_additive, dp_core_levels
from .mat import Transcript
from .noise import NoiseSource

REMOVAL_ORDER = "removal-order"
LEVEL_SORTED = "level-sorted"


@dataclass
class Ordering:
    """A vertex permutation plus the run that produced it.

    Attributes:
        order: vertex ids, earliest first.
        provenance: ``"removal-order"`` or ``"level-sorted"``.
        cores: the underlying k-core run (transcript, levels, removal data).
    """

    order: np.ndarray
    provenance: str
    cores: CoreEstimates | None = None

    def __post_init__(self):
        self.order = np.asarray(self.order, dtype=np.int64)

    @property
    def transcript(self) -> Transcript | None:
        return None if self.cores is None else self.cores.transcript

    @property
    def position(self) -> np.ndarray:
        pos = np.empty(len(self.order), dtype=np.int64)
        pos[self.order] = np.arange(len(self.order))
        return pos

    def is_permutation(self, n: int) -> bool:
        return len(self.order) == n and np.array_equal(np.sort(self.order), np.arange(n))


@dataclass(frozen=True)
class OrientationReport:
    out_degree: np.ndarray
    max_out_degree: int


def dp_ordering(
    g: Graph, epsilon: float, src: NoiseSource, constant_c: float = 60.0, step_size: float | None = None
) -> Ordering:
    """Removal order of additive peeling with step ``constant_c ln n / eps``.

    Vertices removed in the same pass appear in ascending id. Vertices that
    survive every threshold (possible only through noise) go last, by id.
    """
    cores = dp_core_additive(g, PeelConfig(epsilon, constant_c=constant_c, step_size=step_size), src)
    removed = np.asarray(cores.removal_order, dtype=np.int64)
    rest = np.setdiff1d(np.arange(g.n), removed)
    return Ordering(np.concatenate([removed, rest]), REMOVAL_ORDER, cores)


def dp_ordering_low_rounds(g: Graph, epsilon: float, eta: float, src: NoiseSource) -> Ordering:
    """Vertices sorted by (final level, id) from the level-based k-core run."""
    cores = dp_core_levels(g, epsilon, eta, src)
    order = np.lexsort((np.arange(g.n), cores.levels))
    return Ordering(order, LEVEL_SORTED, cores)


def orientation_outdegrees(g: Graph, ordering) -> OrientationReport:
    """Out-degree of every vertex when edges point from earlier to later.

    ``ordering`` is an Ordering or a sequence of vertex ids.
    """
    order = ordering.order if isinstance(ordering, Ordering) else np.asarray(ordering, dtype=np.int64)
    if len(order) != g.n or not np.array_equal(np.sort(order), np.arange(g.n)):
        raise ValueError("ordering must be a permutation of the vertices")
    pos = np.empty(g.n, dtype=np.int64)
    pos[order] = np.arange(g.n)
    e = g.edges()
    if len(e) == 0:
        return OrientationReport(np.zeros(g.n, dtype=np.int64), 0)
    tail = np.where(pos[e[:, 0]] < pos[e[:, 1]], e[:, 0], e[:, 1])
    out = np.bincount(tail, minlength=g.n).astype(np.int64)
    return OrientationReport(out, int(out.max()))


def removal_consistency_violations(g: Graph, ordering: Ordering) -> list[int]:
    """Removed vertices whose out-degree disagrees with their induced degree at removal.

    A vertex's out-degree is its induced degree in the pass that removed it,
    minus the neighbors removed in that same pass that precede it in the
    ordering (lower ids). With one removal per pass the two are equal.
    """
    if ordering.provenance != REMOVAL_ORDER or ordering.cores is None:
        raise ValueError("needs a removal-order ordering")
    out = orientation_outdegrees(g, ordering).out_degree
    cores = ordering.cores
    rd, rr = cores.removal_degree, cores.removal_round
    pos = ordering.position
    src = np.repeat(np.arange(g.n), g.degrees)
    dst = g.indices
    same_pass_before = (rr[src] >= 0) & (rr[dst] == rr[src]) & (pos[dst] < pos[src])
    expected = rd - np.bincount(src, weights=same_pass_before, minlength=g.n).astype(np.int64)
    removed = rd >= 0
    return np.flatnonzero(removed & (out != expected)).tolist()


def out_degree_bound(g: Graph, epsilon: float, provenance: str, eta: float | None = None, degeneracy: int | None = None) -> float:
    """``d + 120 ln n/eps`` for removal order, ``(2+eta) d + 240 ln n/eps`` for level sort."""
    d = graph_stats(g).degeneracy if degeneracy is None else degeneracy
    if provenance == REMOVAL_ORDER:
        return d + 120.0 * log_n(g.n) / epsilon
    if eta is None:
        raise ValueError("eta is required for level-sorted bounds")
    return (2.0 + eta) * d + 240.0 * log_n(g.n) / epsilon


def ordering_report(g: Graph, ordering: Ordering) -> dict:
    rep = orientation_outdegrees(g, ordering)
    d = graph_stats(g).degeneracy
    cores = ordering.cores
    eps = cores.epsilon if cores is not None else None
    bound = None
    if eps is not None:
        bound = out_degree_bound(g, eps, ordering.provenance, cores.eta, degeneracy=d)
    return {
        "order": ordering.order.tolist(),
        "out_degrees": rep.out_degree.tolist(),
        "max_out_degree": rep.max_out_degree,
        "degeneracy": d,
        "bound_rhs": bound,
    }
