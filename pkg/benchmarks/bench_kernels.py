"""Compiled kernels vs. the pure-Python fallback.

Times each hot kernel under both backends on the same inputs, checks that
the outputs agree, and prints one line per kernel with the speedup.

Usage: python3 benchmarks/bench_kernels.py [--repeat R] [--n N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ledpgraph import _backend
from ledpgraph import graph as G
from ledpgraph.noise import NoiseSource


def _best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases(n: int, dense_n: int):
    g = G.gnp(n, 8 / n, seed=1)
    alive = np.ones(g.n, dtype=bool)
    thr = np.full(g.n, 6.0)
    base = NoiseSource(3).base("kcore/fast", 0)
    yield f"fast_peel_phase  G({n}, 8/n)", lambda k: k.fast_peel_phase(
        g.n, g.indptr, g.indices, alive, thr, 2.0, base, False
    )
    yield f"core_numbers     G({n}, 8/n)", lambda k: k.core_numbers(g.n, g.indptr, g.indices)
    h = G.gnp(dense_n, 0.4, seed=2)
    masks = h.adjacency_masks()
    yield f"subset_edge_counts n={dense_n}", lambda k: k.subset_edge_counts(masks, h.n, 0, h.n)


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--n", type=int, default=20_000, help="vertices for the sparse-graph kernels")
    p.add_argument("--dense-n", type=int, default=18, help="vertices for subset enumeration")
    args = p.parse_args(argv)
    if "compiled" not in _backend.AVAILABLE:
        raise SystemExit("compiled kernels are not built; run `pip install --no-build-isolation -e .` first")
    print(f"{'kernel':<32}{'compiled':>12}{'python':>12}{'speedup':>10}  agree")
    for label, fn in cases(args.n, args.dense_n):
        tc, oc = _best_of(lambda: fn(_backend.module("compiled")), args.repeat)
        tp, op = _best_of(lambda: fn(_backend.module("python")), args.repeat)
        print(f"{label:<32}{tc * 1e3:>10.2f}ms{tp * 1e3:>10.2f}ms{tp / tc:>9.1f}x  {_same(oc, op)}")


if __name__ == "__main__":
    main()
