# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Outputs are identical to ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, floor, INFINITY
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef int64_t NEVER = 0x7FFFFFFFFFFFFFFF


cdef inline uint64_t mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double uniform(uint64_t base, int64_t vertex, int64_t index) nogil:
    cdef uint64_t h = mix(base + <uint64_t>(vertex + 1) * GOLDEN)
    h = mix(h + <uint64_t>(index + 1) * GOLDEN)
    return (<double>(h >> 11) + 0.5) * 1.1102230246251565e-16


cdef inline double le_prob(double t, double b) nogil:
    if t >= 0:
        return 1.0 - 0.5 * exp(-t / b)
    return 0.5 * exp(t / b)


cdef inline double geometric(double u, double q) nogil:
    if q >= 1.0:
        return 1.0
    if q <= 0.0:
        return INFINITY
    return 1.0 + floor(log(u) / log1p(-q))


cdef inline int popcount(uint64_t x) nogil:
    x = x - ((x >> 1) & 0x5555555555555555ULL)
    x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0FULL
    return <int>((x * 0x0101010101010101ULL) >> 56)


def core_numbers(int64_t n, const int64_t[::1] indptr, const int64_t[::1] indices):
    """Bucket peeling (Batagelj-Zaversnik)."""
    cdef int64_t[::1] deg = np.diff(np.asarray(indptr)).astype(np.int64)
    core_arr = np.zeros(n, dtype=np.int64)
    if n == 0:
        return core_arr
    cdef int64_t[::1] core = core_arr
    cdef int64_t md = 0, v, u, i, j, d, start, num, pu, pw, w
    for v in range(n):
        if deg[v] > md:
            md = deg[v]
    cdef int64_t[::1] bin_ = np.zeros(md + 1, dtype=np.int64)
    cdef int64_t[::1] pos = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] vert = np.zeros(n, dtype=np.int64)
    for v in range(n):
        bin_[deg[v]] += 1
    start = 0
    for d in range(md + 1):
        num = bin_[d]
        bin_[d] = start
        start += num
    for v in range(n):
        pos[v] = bin_[deg[v]]
        vert[pos[v]] = v
        bin_[deg[v]] += 1
    for d in range(md, 0, -1):
        bin_[d] = bin_[d - 1]
    bin_[0] = 0
    for i in range(n):
        v = vert[i]
        core[v] = deg[v]
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if deg[u] > deg[v]:
                d = deg[u]
                pu = pos[u]
                pw = bin_[d]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bin_[d] += 1
                deg[u] -= 1
    return core_arr


def subset_edge_counts(const int64_t[::1] adj_masks, int n, int64_t start, int low):
    """E(S) for the 2^low consecutive masks beginning at ``start``."""
    cdef int64_t size = (<int64_t>1) << low
    out_arr = np.zeros(size, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef int64_t base = 0, i, half
    cdef int v, b
    for v in range(low, n):
        if (start >> v) & 1:
            base += popcount(<uint64_t>(adj_masks[v] & start & (((<int64_t>1) << v) - 1)))
    out[0] = base
    with nogil:
        for b in range(low):
            half = (<int64_t>1) << b
            for i in range(half):
                out[half + i] = out[i] + popcount(<uint64_t>(adj_masks[b] & (start + i)))
    return out_arr


def fast_peel_phase(int64_t n, const int64_t[::1] indptr, const int64_t[::1] indices,
                    alive_in, const double[::1] thresholds, double b, uint64_t base,
                    bint zero_noise):
    """Event-driven peel phase; see ``_fallback.fast_peel_phase``."""
    alive_arr = np.array(alive_in, dtype=np.uint8)
    cdef unsigned char[::1] alive = alive_arr
    cdef int64_t m2 = indptr[n] if n > 0 else 0
    remove_step_arr = np.where(alive_arr, -1, 0).astype(np.int64)
    cdef int64_t[::1] remove_step = remove_step_arr
    cdef int64_t[::1] deg = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] remove_time = np.full(n, NEVER, dtype=np.int64)
    cdef int64_t[::1] head = np.full(n + 2, -1, dtype=np.int64)
    # bucket lists share one node pool; every push is a resample, bounded by n + m2
    cdef int64_t pool_size = n + m2 + 1
    cdef int64_t[::1] node_v = np.zeros(pool_size, dtype=np.int64)
    cdef int64_t[::1] node_next = np.zeros(pool_size, dtype=np.int64)
    cdef int64_t[::1] updated = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] removed = np.zeros(n + 1, dtype=np.int64)
    cdef unsigned char[::1] flagged = np.zeros(n, dtype=np.uint8)
    cdef int64_t n_updated = 0, n_removed, used = 0, t = 0, v, u, j, k, node, when
    cdef double slack, g
    with nogil:
        for v in range(n):
            if alive[v]:
                for j in range(indptr[v], indptr[v + 1]):
                    if alive[indices[j]]:
                        deg[v] += 1
                updated[n_updated] = v
                n_updated += 1
        while True:
            for k in range(n_updated):
                v = updated[k]
                flagged[v] = 0
                slack = thresholds[v] - <double>deg[v]
                if zero_noise:
                    g = 1.0 if slack >= 0 else INFINITY
                else:
                    g = geometric(uniform(base, v, t), le_prob(slack, b))
                if g > <double>(n + 1 - t):
                    remove_time[v] = NEVER
                else:
                    when = t + <int64_t>g
                    remove_time[v] = when
                    node_v[used] = v
                    node_next[used] = head[when]
                    head[when] = used
                    used += 1
            n_updated = 0
            t += 1
            n_removed = 0
            node = head[t] if t <= n + 1 else -1
            while node != -1:
                v = node_v[node]
                if alive[v] and remove_time[v] == t:
                    alive[v] = 0
                    remove_step[v] = t
                    removed[n_removed] = v
                    n_removed += 1
                node = node_next[node]
            if n_removed == 0:
                break
            for k in range(n_removed):
                v = removed[k]
                for j in range(indptr[v], indptr[v + 1]):
                    u = indices[j]
                    if alive[u]:
                        deg[u] -= 1
                        if not flagged[u]:
                            flagged[u] = 1
                            updated[n_updated] = u
                            n_updated += 1
    return remove_step_arr, t
