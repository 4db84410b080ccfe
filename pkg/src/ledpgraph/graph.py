"""Simple undirected graphs, edge-list I/O, generators and exact oracles."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _backend

DENSEST_CAP = 26


class GraphFormatError(ValueError):
    pass


class CapExceeded(ValueError):
    """Raised when a brute-force routine is asked to enumerate too many subsets."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph in CSR form.

    ``indices[indptr[v]:indptr[v + 1]]`` is the sorted neighbor list of ``v``.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    _degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        deg = np.diff(self.indptr)
        deg.setflags(write=False)
        object.__setattr__(self, "_degrees", deg)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from an iterable of ``(u, v)`` pairs; duplicates collapse."""
        n = int(n)
        if n < 0:
            raise GraphFormatError("vertex count must be non-negative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if len(e):
            if e.min() < 0:
                raise GraphFormatError("negative vertex id")
            if e.max() >= n:
                raise GraphFormatError(f"vertex id {int(e.max())} out of range for n={n}")
            loops = e[:, 0] == e[:, 1]
            if loops.any():
                raise GraphFormatError(f"self-loop at vertex {int(e[loops][0, 0])}")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key = np.unique(lo * max(n, 1) + hi)
        lo, hi = key // max(n, 1), key % max(n, 1)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst.astype(np.int64))

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @property
    def adj(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def edges(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` array with ``u < v``, sorted."""
        src = np.repeat(np.arange(self.n), self._degrees)
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def adjacency_masks(self) -> np.ndarray:
        """Per-vertex neighbor bitmasks (requires n <= 62)."""
        if self.n > 62:
            raise CapExceeded("bitmask adjacency needs n <= 62")
        masks = np.zeros(self.n, dtype=np.int64)
        e = self.edges()
        np.bitwise_or.at(masks, e[:, 0], np.left_shift(np.int64(1), e[:, 1]))
        np.bitwise_or.at(masks, e[:, 1], np.left_shift(np.int64(1), e[:, 0]))
        return masks

    def induced_degrees(self, alive: np.ndarray) -> np.ndarray:
        """Degree of every vertex into the boolean mask ``alive``."""
        src = np.repeat(np.arange(self.n), self._degrees)
        return np.bincount(src, weights=alive[self.indices], minlength=self.n).astype(np.int64)

    def canonical(self) -> tuple:
        return (self.n, tuple(map(tuple, self.edges().tolist())))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.indptr, other.indptr) and np.array_equal(
            self.indices, other.indices
        )

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


# --------------------------------------------------------------------------- I/O

_HEADER = re.compile(r"^n\s+(\S+)$")


def parse_edge_list(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head = _HEADER.match(line)
        if head:
            if n is not None or edges:
                raise GraphFormatError(f"line {lineno}: 'n' header must come first")
            try:
                n = int(head.group(1))
            except ValueError:
                raise GraphFormatError(f"line {lineno}: bad vertex count {head.group(1)!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex id in {raw!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex id")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at vertex {u}")
        edges.append((u, v))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return Graph.from_edges(n, edges)


def load_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"]
    lines += [f"{u} {v}" for u, v in g.edges().tolist()]
    return "\n".join(lines) + "\n"


def save_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g))


# ---------------------------------------------------------------------- generators


def clique(n: int) -> Graph:
    iu = np.triu_indices(n, 1)
    return Graph.from_edges(n, np.stack(iu, axis=1))


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves: int) -> Graph:
    """Center 0 joined to ``leaves`` leaves 1..leaves."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def empty(n: int) -> Graph:
    return Graph.from_edges(n, [])


def gnp(n: int, p: float, seed: int = 0) -> Graph:
    """Erdos-Renyi G(n, p), sampled by geometric skips over the pair index."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"gnp probability must lie in [0, 1], got {p}")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return empty(n)
    if p == 1.0:
        return clique(n)
    rng = np.random.default_rng(seed)
    picks = []
    pos = -1
    while pos < total:
        batch = max(1024, int(1.2 * p * (total - pos)) + 64)
        steps = np.cumsum(rng.geometric(p, size=batch)) + pos
        picks.append(steps[steps < total])
        pos = steps[-1]
    idx = np.concatenate(picks)
    # pair index -> (u, v) with u < v, enumerated column by column
    v = ((1 + np.sqrt(1 + 8 * idx.astype(np.float64))) // 2).astype(np.int64)
    v[v * (v - 1) // 2 > idx] -= 1
    v[(v + 1) * v // 2 <= idx] += 1
    u = idx - v * (v - 1) // 2
    return Graph.from_edges(n, np.stack([u, v], axis=1))


def disjoint_union(*parts: Graph) -> Graph:
    edges, offset = [], 0
    for g in parts:
        edges.append(g.edges() + offset)
        offset += g.n
    return Graph.from_edges(offset, np.concatenate(edges) if edges else np.zeros((0, 2), np.int64))


def generate(kind: str, **params) -> Graph:
    """Dispatch to a named generator.

    ``kind`` is one of clique, path, star, gnp, disjoint-union; ``params`` are
    passed through (``n``, ``leaves``, ``p``, ``seed``, ``parts``).
    """
    try:
        if kind == "clique":
            return clique(_size(params["n"]))
        if kind == "path":
            return path(_size(params["n"]))
        if kind == "star":
            return star(_size(params["leaves"]))
        if kind == "empty":
            return empty(_size(params["n"]))
        if kind == "gnp":
            return gnp(_size(params["n"]), float(params["p"]), int(params.get("seed", 0)))
        if kind == "disjoint-union":
            return disjoint_union(*params["parts"])
    except KeyError as exc:
        raise ValueError(f"generator {kind!r} is missing parameter {exc}") from None
    raise ValueError(f"unknown generator kind {kind!r}")


def _size(x) -> int:
    x = int(x)
    if x < 0:
        raise ValueError("graph size must be non-negative")
    return x


def parse_generator(spec: str) -> Graph:
    """Parse a CLI generator spec.

    Forms: ``clique:N``, ``path:N``, ``star:LEAVES``, ``empty:N``,
    ``gnp:N:P[:SEED]`` and ``union:SPEC,SPEC,...``.
    """
    spec = spec.strip()
    if spec.startswith("union:"):
        return disjoint_union(*(parse_generator(s) for s in spec[len("union:") :].split(",")))
    kind, *args = spec.split(":")
    try:
        if kind in ("clique", "path", "empty") and len(args) == 1:
            return generate(kind, n=int(args[0]))
        if kind == "star" and len(args) == 1:
            return generate(kind, leaves=int(args[0]))
        if kind == "gnp" and len(args) in (2, 3):
            seed = int(args[2]) if len(args) == 3 else 0
            return generate(kind, n=int(args[0]), p=float(args[1]), seed=seed)
    except ValueError as exc:
        raise ValueError(f"bad generator spec {spec!r}: {exc}") from None
    raise ValueError(f"bad generator spec {spec!r}")


# ------------------------------------------------------------------------ oracles


@dataclass(frozen=True)
class GraphStats:
    max_degree: int
    degeneracy: int


@dataclass(frozen=True)
class DensityReport:
    subset: tuple[int, ...]
    edges_inside: int
    density: Fraction

    def to_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "edges_inside": self.edges_inside,
            "density": float(self.density),
            "density_exact": [self.density.numerator, self.density.denominator],
        }


def exact_core_numbers(g: Graph) -> np.ndarray:
    """Exact core numbers by threshold peeling.

    For k = 1, 2, ... every surviving vertex of induced degree < k is removed,
    pass after pass, until a pass removes nobody; the survivors get label k.
    """
    alive = np.ones(g.n, dtype=bool)
    deg = g.degrees.astype(np.int64).copy()
    labels = np.zeros(g.n, dtype=np.int64)
    for k in range(1, g.n + 1):
        if not alive.any():
            break
        while True:
            peel = np.flatnonzero(alive & (deg < k))
            if len(peel) == 0:
                break
            alive[peel] = False
            _drop_neighbors(g, peel, deg)
        labels[alive] = k
    return labels


def _drop_neighbors(g: Graph, removed: np.ndarray, deg: np.ndarray) -> None:
    starts, stops = g.indptr[removed], g.indptr[removed + 1]
    counts = stops - starts
    if counts.sum() == 0:
        return
    offs = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(counts.sum())
    np.subtract.at(deg, g.indices[offs], 1)


def core_numbers_bucket(g: Graph) -> np.ndarray:
    """Exact core numbers by min-degree bucket peeling (compiled when available)."""
    return _backend.core_numbers(g.n, g.indptr, g.indices)


def graph_stats(g: Graph) -> GraphStats:
    cores = exact_core_numbers(g)
    return GraphStats(
        max_degree=int(g.degrees.max()) if g.n else 0,
        degeneracy=int(cores.max()) if g.n else 0,
    )


def density_of(g: Graph, s) -> DensityReport:
    members = sorted({int(v) for v in s})
    if not members:
        raise ValueError("density of the empty set is undefined")
    if members[0] < 0 or members[-1] >= g.n:
        raise ValueError("subset contains a vertex outside the graph")
    inside = np.zeros(g.n, dtype=bool)
    inside[members] = True
    e = g.edges()
    count = int(np.count_nonzero(inside[e[:, 0]] & inside[e[:, 1]]))
    return DensityReport(tuple(members), count, Fraction(count, len(members)))


def mask_to_subset(mask: int) -> tuple[int, ...]:
    out, v = [], 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def best_subset(adj_masks: np.ndarray, n: int, flip: Fraction = Fraction(0)) -> tuple[int, int]:
    """Brute-force argmax over non-empty subsets S of (E(S) - C(|S|,2)*flip) / |S|.

    ``adj_masks`` are neighbor bitmasks. Ties go to the smaller subset, then
    to the lexicographically smallest sorted vertex list. Returns
    ``(mask, E(S))``.
    """
    if n > DENSEST_CAP:
        raise CapExceeded(f"brute-force enumeration capped at n <= {DENSEST_CAP}, got n={n}")
    if n == 0:
        raise ValueError("graph has no vertices")
    adj_masks = np.ascontiguousarray(adj_masks, dtype=np.int64)
    low = min(n, 20)
    chunk = 1 << low
    flip_f = float(flip)
    weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)  # vertex i -> bit n-1-i
    best = None  # (value Fraction, size, rev, mask, edges)
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, start + chunk, dtype=np.int64)
        counts = _backend.subset_edge_counts(adj_masks, n, start, low)
        sizes = np.bitwise_count(masks).astype(np.int64)
        if start == 0:
            sizes[0] = 1  # the empty set is skipped below
        score = counts / sizes - 0.5 * (sizes - 1) * flip_f
        if start == 0:
            score[0] = -np.inf
        top = score.max()
        cand = np.flatnonzero(score >= top - 1e-9 * max(1.0, abs(top)))
        # exact resolution over the distinct (count, size) pairs among candidates
        codes = np.unique(counts[cand] * 64 + sizes[cand])
        pairs = {(int(c) // 64, int(c) % 64) for c in codes}
        vals = {pr: Fraction(pr[0], pr[1]) - Fraction(pr[1] - 1, 2) * flip for pr in pairs}
        vmax = max(vals.values())
        smin = min(s for (c, s), v in vals.items() if v == vmax)
        keep = [c for (c, s), v in vals.items() if v == vmax and s == smin]
        sel = cand[(sizes[cand] == smin) & np.isin(counts[cand], keep)]
        rev = _reverse_bits(masks[sel], n, weights)
        j = int(np.argmax(rev))
        entry = (vmax, smin, int(rev[j]), int(masks[sel][j]), int(counts[sel][j]))
        if best is None or _better(entry, best):
            best = entry
    return best[3], best[4]


def _better(a, b) -> bool:
    if a[0] != b[0]:
        return a[0] > b[0]
    if a[1] != b[1]:
        return a[1] < b[1]
    return a[2] > b[2]


def _reverse_bits(masks: np.ndarray, n: int, weights: np.ndarray) -> np.ndarray:
    bits = (masks[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return bits @ weights


def exact_densest_subset(g: Graph) -> DensityReport:
    """Maximum-density subset by enumerating all 2^n subsets (n <= 26)."""
    if g.n > DENSEST_CAP:
        raise CapExceeded(f"exact densest subgraph is capped at n <= {DENSEST_CAP}, got n={g.n}")
    mask, edges = best_subset(g.adjacency_masks(), g.n)
    subset = mask_to_subset(mask)
    return DensityReport(subset, edges, Fraction(edges, len(subset)))


def log_n(n: int) -> float:
    """Natural log used in every noise constant; floored at ln 2 for tiny graphs."""
    return math.log(max(n, 2))
