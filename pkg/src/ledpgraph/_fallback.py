"""Pure-Python/numpy versions of the compiled kernels.

Signatures and outputs match ``_kernels.pyx`` exactly; the test suite runs
both and compares them element for element.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from .noise import GOLDEN

NEVER = np.iinfo(np.int64).max


def core_numbers(n, indptr, indices):
    deg = np.diff(indptr).astype(np.int64)
    core = np.zeros(n, dtype=np.int64)
    removed = np.zeros(n, dtype=bool)
    heap = [(int(d), v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    k = 0
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        k = max(k, d)
        core[v] = k
        removed[v] = True
        for u in indices[indptr[v] : indptr[v + 1]]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (int(deg[u]), int(u)))
    return core


def subset_edge_counts(adj_masks, n, start, low):
    """Edge counts E(S) for the 2^low masks start, start+1, ...

    ``start`` must be a multiple of 2^low. Built by doubling: the masks with
    bit b set in the low part are the previous block plus vertex b.
    """
    size = 1 << low
    masks = np.arange(start, start + size, dtype=np.int64)
    out = np.zeros(size, dtype=np.int64)
    base = 0
    for v in range(low, n):
        if start >> v & 1:
            base += int(np.bitwise_count(np.int64(adj_masks[v]) & np.int64(start) & np.int64((1 << v) - 1)))
    out[0] = base
    for b in range(low):
        half = 1 << b
        out[half : 2 * half] = out[:half] + np.bitwise_count(np.int64(adj_masks[b]) & masks[:half]).astype(np.int64)
    return out


_G = int(GOLDEN)
_MASK = 0xFFFFFFFFFFFFFFFF


def _mix(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _uniform(base, vertex, index):
    h = _mix((base + (vertex + 1) * _G) & _MASK)
    h = _mix((h + (index + 1) * _G) & _MASK)
    return ((h >> 11) + 0.5) * 2.0**-53


def _le_prob(t, b):
    if t >= 0:
        return 1.0 - 0.5 * math.exp(-t / b)
    return 0.5 * math.exp(t / b)


def _geometric(u, q):
    if q >= 1.0:
        return 1.0
    if q <= 0.0:
        return math.inf
    return 1.0 + math.floor(math.log(u) / math.log1p(-q))


def fast_peel_phase(n, indptr, indices, alive, thresholds, b, base, zero_noise):
    """Event-driven peel phase with geometric removal times.

    Returns ``(remove_step, steps)`` where ``remove_step[v]`` is the step at
    which ``v`` was removed (0 for vertices not alive on entry, -1 for
    survivors) and ``steps`` counts executed steps including the final empty
    one.
    """
    alive = np.array(alive, dtype=bool)
    deg = np.zeros(n, dtype=np.int64)
    for v in np.flatnonzero(alive):
        nb = indices[indptr[v] : indptr[v + 1]]
        deg[v] = int(np.count_nonzero(alive[nb]))
    remove_time = np.full(n, NEVER, dtype=np.int64)
    remove_step = np.where(alive, -1, 0).astype(np.int64)
    buckets: dict[int, list[int]] = {}
    updated = [int(v) for v in np.flatnonzero(alive)]
    flagged = np.zeros(n, dtype=bool)
    t = 0
    base = int(base)
    while True:
        for v in updated:
            flagged[v] = False
            slack = float(thresholds[v]) - int(deg[v])
            if zero_noise:
                g = 1.0 if slack >= 0 else math.inf
            else:
                g = _geometric(_uniform(base, v, t), _le_prob(slack, b))
            if g > n + 1 - t:
                remove_time[v] = NEVER
            else:
                when = t + int(g)
                remove_time[v] = when
                buckets.setdefault(when, []).append(v)
        updated = []
        t += 1
        removed = sorted({v for v in buckets.pop(t, ()) if alive[v] and remove_time[v] == t})
        if not removed:
            return remove_step, t
        for v in removed:
            alive[v] = False
            remove_step[v] = t
        for v in removed:
            for u in indices[indptr[v] : indptr[v + 1]]:
                if alive[u]:
                    deg[u] -= 1
                    if not flagged[u]:
                        flagged[u] = True
                        updated.append(int(u))
