"""Private densest subgraph: from core estimates, and by one-round randomized response."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import (
    DENSEST_CAP,
    CapExceeded,
    DensityReport,
    Graph,
    best_subset,
    log_n,
    mask_to_subset,
)
from .kcore import CoreEstimates
from .noise import NoiseSource


def default_alpha(n: int, epsilon: float, c: float = 120.0) -> float:
    return c * log_n(n) / epsilon


def densest_from_cores(cores, gamma: float = 1.0, alpha: float | None = None, epsilon: float | None = None) -> list[int]:
    """Vertices whose estimate is at least ``max_estimate / gamma - alpha``.

    ``cores`` is a CoreEstimates or a plain array of per-vertex estimates.
    ``alpha`` defaults to 120 ln n / eps.
    """
    if isinstance(cores, CoreEstimates):
        eps = cores.epsilon if epsilon is None else epsilon
        labels = np.asarray(cores.labels, dtype=np.float64)
    else:
        eps = epsilon
        labels = np.asarray(cores, dtype=np.float64)
    if labels.size == 0:
        raise ValueError("no core estimates")
    if not gamma >= 1:
        raise ValueError("gamma must be at least 1")
    if alpha is None:
        if eps is None:
            raise ValueError("alpha or epsilon is required")
        alpha = default_alpha(len(labels), eps)
    cutoff = labels.max() / gamma - alpha
    return np.flatnonzero(labels >= cutoff).tolist()


@dataclass
class RRGraph:
    """Randomized-response reports, one bit per unordered pair.

    ``bits[k]`` is the report for the k-th pair ``(u, v)``, ``u < v``, in
    row-major order of the upper triangle; the pair is reported by ``u``.
    """

    n: int
    p: float
    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if len(self.bits) != self.n * (self.n - 1) // 2:
            raise ValueError("expected exactly one bit per unordered pair")

    @property
    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        return np.triu_indices(self.n, 1)

    def as_graph(self) -> Graph:
        iu, iv = self.pairs
        keep = self.bits.astype(bool)
        return Graph.from_edges(self.n, np.stack([iu[keep], iv[keep]], axis=1))

    def raw_count(self, subset) -> int:
        inside = np.zeros(self.n, dtype=bool)
        inside[list(subset)] = True
        iu, iv = self.pairs
        return int(np.count_nonzero(self.bits.astype(bool) & inside[iu] & inside[iv]))

    def to_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "bits": self.bits.tolist()}


def keep_probability(epsilon: float) -> float:
    if math.isinf(epsilon):
        return 1.0
    return math.exp(epsilon) / (1.0 + math.exp(epsilon))


def randomize_response(g: Graph, epsilon: float, src: NoiseSource) -> RRGraph:
    """Each vertex reports its pairs with later vertices, keeping each bit w.p. e^eps/(1+e^eps).

    ``epsilon = inf`` (or a zero-noise source) reports the true bits with p = 1.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    p = keep_probability(epsilon)
    iu, iv = np.triu_indices(g.n, 1)
    truth = np.zeros(len(iu), dtype=bool)
    if g.m:
        e = g.edges()
        # position of (u, v), u < v, in the row-major upper triangle
        pos = e[:, 0] * g.n - e[:, 0] * (e[:, 0] + 1) // 2 + (e[:, 1] - e[:, 0] - 1)
        truth[pos] = True
    if p >= 1.0 or src.zero_noise:
        return RRGraph(g.n, 1.0, truth.astype(np.uint8))
    keep = src.uniform("rr", iu, 0, iv) < p
    return RRGraph(g.n, p, np.where(keep, truth, ~truth).astype(np.uint8))


@dataclass(frozen=True)
class EdgeEstimate:
    subset: tuple[int, ...]
    raw_count: int
    estimate: float
    density_estimate: float


def estimate_edges(rr: RRGraph, subset) -> EdgeEstimate:
    """Unbiased estimate (E_R(S) - C(|S|,2)(1-p)) / (2p - 1) of the edges inside S."""
    members = tuple(sorted({int(v) for v in subset}))
    if not members:
        raise ValueError("subset must be non-empty")
    raw = rr.raw_count(members)
    s = len(members)
    est = (raw - math.comb(s, 2) * (1.0 - rr.p)) / (2.0 * rr.p - 1.0)
    return EdgeEstimate(members, raw, est, est / s)


@dataclass(frozen=True)
class OneRoundResult:
    subset: tuple[int, ...]
    raw_count: int
    estimated_edges: float
    estimated_density: float

    def to_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "raw_count": self.raw_count,
            "estimated_edges": self.estimated_edges,
            "estimated_density": self.estimated_density,
        }


def one_round_densest(rr: RRGraph) -> OneRoundResult:
    """Non-empty subset maximizing the estimated density, by enumeration (n <= 26).

    Ties go to the smaller subset, then the lexicographically smaller one.
    Comparisons are exact in the rationals (``1 - p`` is taken as the exact
    binary value of the float).
    """
    if rr.n > DENSEST_CAP:
        raise CapExceeded(f"one-round densest subgraph is capped at n <= {DENSEST_CAP}, got n={rr.n}")
    if not rr.p > 0.5:
        raise ValueError("keep probability must exceed 1/2")
    masks = rr.as_graph().adjacency_masks()
    mask, raw = best_subset(masks, rr.n, flip=Fraction(1.0 - rr.p))
    subset = mask_to_subset(mask)
    s = len(subset)
    est = (raw - math.comb(s, 2) * (1.0 - rr.p)) / (2.0 * rr.p - 1.0)
    return OneRoundResult(subset, raw, est, est / s)


def one_round_bound(n: int, epsilon: float, c: float = 2.0) -> float:
    """2 sqrt(n + c ln n) (e^eps + 1) / (e^eps - 1)."""
    return 2.0 * math.sqrt(n + c * math.log(n)) * (math.exp(epsilon) + 1) / (math.exp(epsilon) - 1)
