"""Private k-core decomposition.

Three algorithms share the MAT engine with one coordinate per vertex and
sensitivity 2:

* additive-step peeling: thresholds k = s, 2s, ... with s = c ln n / eps;
* multiplicative-step peeling: k starts at c ln n / eps and grows by (1 + eta),
  optionally running each phase with geometric removal times (near-linear);
* level-based peeling in O(log^2 n) rounds.

A vertex is removed in a pass when ``d(v) + Lap(8/eps) <= k + offset(v)`` with
``offset(v) ~ Lap(4/eps)`` drawn once. In MAT terms the query is ``k - d(v)``,
the noisy threshold is ``-offset(v)`` and removal is the top answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .graph import Graph, _drop_neighbors, log_n
from .mat import MatConfig, MatState, Transcript
from .noise import NoiseSource

KCORE_SENSITIVITY = 2.0


@dataclass(frozen=True)
class PeelConfig:
    """Peeling schedule.

    ``step`` is "additive" or "multiplicative". For additive peeling
    ``step_size`` overrides the default ``constant_c * ln n / eps``.
    """

    epsilon: float
    step: str = "additive"
    eta: float = 0.5
    constant_c: float = 60.0
    step_size: float | None = None
    fast_inner_loop: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.step not in ("additive", "multiplicative"):
            raise ValueError(f"unknown step kind {self.step!r}")
        if self.step == "multiplicative" and not self.eta > 0:
            raise ValueError("eta must be positive for multiplicative peeling")
        if self.step_size is not None and not self.step_size > 0:
            raise ValueError("step size must be positive")
        if not self.constant_c > 0:
            raise ValueError("constant_c must be positive")

    def schedule(self, n: int) -> list[float]:
        base = self.constant_c * log_n(n) / self.epsilon
        ks = []
        if self.step == "additive":
            s = self.step_size if self.step_size is not None else base
            j = 1
            while j * s <= n:
                ks.append(j * s)
                j += 1
        else:
            k = base
            while k <= n:
                ks.append(k)
                k *= 1.0 + self.eta
        return ks


@dataclass
class CoreEstimates:
    algorithm: str
    labels: np.ndarray
    epsilon: float
    transcript: Transcript
    eta: float | None = None
    seed: int | None = None
    removal_order: list = field(default_factory=list)
    removal_round: np.ndarray | None = None
    removal_degree: np.ndarray | None = None
    levels: np.ndarray | None = None

    @property
    def rounds(self) -> int:
        return self.transcript.round_count

    def to_dict(self) -> dict:
        labels = self.labels.tolist()
        return {
            "algorithm": self.algorithm,
            "epsilon": self.epsilon,
            "eta": self.eta,
            "labels": labels,
            "rounds": self.rounds,
            "seed": self.seed,
        }


def _seed_of(src: NoiseSource):
    return None if src.zero_noise else src.seed


def _offsets_state(g: Graph, eps: float, src: NoiseSource, name: str) -> MatState:
    return MatState(MatConfig(np.zeros(max(g.n, 1)), eps, KCORE_SENSITIVITY), src, name)


def _peel(g: Graph, cfg: PeelConfig, src: NoiseSource, algorithm: str, check: bool) -> CoreEstimates:
    n = g.n
    state = _offsets_state(g, cfg.epsilon, src, "kcore")
    offsets = -state.noisy_thresholds[:n]
    if n == 0:
        state.active[:] = False
    labels = np.zeros(n, dtype=np.float64)
    deg = g.degrees.astype(np.int64).copy()
    removal_round = np.full(n, -1, dtype=np.int64)
    removal_degree = np.full(n, -1, dtype=np.int64)
    order: list[int] = []
    b = 8.0 / cfg.epsilon
    for phase, k in enumerate(cfg.schedule(n)):
        if not state.active.any():
            break
        if cfg.fast_inner_loop:
            alive = state.active.copy()
            remove_step, steps = _backend.fast_peel_phase(
                n, g.indptr, g.indices, alive, np.ascontiguousarray(k + offsets),
                b, src.base("kcore/fast", phase), src.zero_noise,
            )
            for s in range(1, steps + 1):
                crossed = np.flatnonzero(remove_step == s)
                removal_round[crossed] = state.query_count
                state.commit(crossed, f"k={k:g}")
                order.extend(crossed.tolist())
            deg = g.induced_degrees(state.active)
        else:
            while True:
                f = np.full(n, k) - deg
                ans = state.query(f, label=f"k={k:g}")
                crossed = np.flatnonzero(ans == 1)
                if len(crossed) == 0:
                    break
                removal_round[crossed] = state.query_count - 1
                removal_degree[crossed] = deg[crossed]
                order.extend(crossed.tolist())
                _drop_neighbors(g, crossed, deg)
        if check:
            recomputed = g.induced_degrees(state.active)
            if not np.array_equal(recomputed[state.active], deg[state.active]):
                raise AssertionError("incremental induced degrees drifted from recomputation")
        labels[state.active] = k
    if cfg.fast_inner_loop:
        removal_degree = removal_degrees(g, removal_round)
    return CoreEstimates(
        algorithm=algorithm,
        labels=labels,
        epsilon=cfg.epsilon,
        transcript=state.transcript,
        eta=cfg.eta if cfg.step == "multiplicative" else None,
        seed=_seed_of(src),
        removal_order=order,
        removal_round=removal_round,
        removal_degree=removal_degree,
    )


def removal_degrees(g: Graph, removal_round: np.ndarray) -> np.ndarray:
    """Induced degree of each removed vertex at the start of its removal pass."""
    rr = np.where(removal_round < 0, np.iinfo(np.int64).max, removal_round)
    src = np.repeat(np.arange(g.n), g.degrees)
    later = rr[g.indices] >= rr[src]
    out = np.bincount(src, weights=later, minlength=g.n).astype(np.int64)
    out[removal_round < 0] = -1
    return out


def dp_core_additive(g: Graph, cfg: PeelConfig, src: NoiseSource, check: bool = False) -> CoreEstimates:
    """Peel with thresholds s, 2s, 3s, ... <= n; survivors of threshold k get label k."""
    if cfg.step != "additive":
        raise ValueError("dp_core_additive needs an additive PeelConfig")
    return _peel(g, cfg, src, "kcore-additive", check)


def dp_core_multiplicative(g: Graph, cfg: PeelConfig, src: NoiseSource, check: bool = False) -> CoreEstimates:
    """Peel with thresholds c ln n/eps * (1+eta)^j <= n."""
    if cfg.step != "multiplicative":
        raise ValueError("dp_core_multiplicative needs a multiplicative PeelConfig")
    return _peel(g, cfg, src, "kcore-multiplicative", check)


def fast_peel_phase(g: Graph, alive, threshold_of, epsilon: float, src: NoiseSource, phase: int = 0) -> np.ndarray:
    """One peel phase with geometric removal times; returns the survivor mask.

    Each alive vertex is removed at a step with probability
    ``p = Pr[Lap(8/eps) <= threshold(v) - d(v)]``; instead of flipping that
    coin every step, the next removal time is drawn as ``Geom(p)`` and only
    redrawn when a neighbor leaves.
    """
    survivors, _, _ = fast_peel_phase_detail(g, alive, threshold_of, epsilon, src, phase)
    return survivors


def fast_peel_phase_detail(g: Graph, alive, threshold_of, epsilon: float, src: NoiseSource, phase: int = 0):
    alive = np.asarray(alive, dtype=bool)
    thr = np.ascontiguousarray(np.broadcast_to(np.asarray(threshold_of, dtype=np.float64), (g.n,)))
    remove_step, steps = _backend.fast_peel_phase(
        g.n, g.indptr, g.indices, alive, thr, 8.0 / epsilon, src.base("kcore/fast", phase), src.zero_noise
    )
    return remove_step == -1, remove_step, steps


def naive_peel_phase(g: Graph, alive, threshold_of, epsilon: float, src: NoiseSource, phase: int = 0):
    """One peel phase pass by pass: fresh Lap(8/eps) per alive vertex per pass.

    Returns ``(survivor mask, passes)``.
    """
    alive = np.array(alive, dtype=bool)
    thr = np.broadcast_to(np.asarray(threshold_of, dtype=np.float64), (g.n,))
    deg = g.induced_degrees(alive)
    b = 8.0 / epsilon
    t = 0
    while True:
        t += 1
        idx = np.flatnonzero(alive)
        noise = src.laplace(b, "kcore/naive", idx, phase, t)
        out = idx[deg[idx] + noise <= thr[idx]]
        if len(out) == 0:
            return alive, t
        alive[out] = False
        _drop_neighbors(g, out, deg)


# ----------------------------------------------------------------- level-based


def round_bound(n: int) -> int:
    """ceil(4 log2(n)^2), at least 1."""
    return max(1, math.ceil(4 * math.log2(max(n, 2)) ** 2))


def level_params(eta: float) -> tuple[float, float]:
    """(psi, lambda) for the level algorithm."""
    psi = 0.1 * eta
    lam = 2 * (30 - eta) * eta / (eta + 10) ** 2
    return psi, lam


def level_threshold(r: int, n: int, eta: float) -> float:
    psi, _ = level_params(eta)
    return (1 + psi) ** math.floor(r / (2 * math.log2(max(n, 2))))


def core_estimate_from_level(final_level, n: int, eta: float):
    """(2+lambda) (1+psi)^max(floor((l+1) / (4 ceil(log_{1+psi} n))) - 1, 0)."""
    psi, lam = level_params(eta)
    group = 4 * max(1, math.ceil(math.log(max(n, 2)) / math.log1p(psi)))
    lvl = np.asarray(final_level, dtype=np.int64)
    if np.any(lvl < 0):
        raise ValueError("levels are non-negative")
    expo = np.maximum((lvl + 1) // group - 1, 0)
    out = (2 + lam) * (1 + psi) ** expo
    return out if out.ndim else float(out)


def dp_core_levels(g: Graph, epsilon: float, eta: float, src: NoiseSource) -> CoreEstimates:
    """Level-based private k-core in at most ceil(4 log2^2 n) rounds.

    In round r every vertex still at level r counts its neighbors at level r,
    adds Lap(8/eps) and moves up iff the sum exceeds
    ``(1+psi)^floor(r / (2 log2 n)) + offset``; otherwise it stops for good.
    The run ends early once every vertex has stopped.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not eta > 0:
        raise ValueError("eta must be positive")
    n = g.n
    R = round_bound(n)
    state = _offsets_state(g, epsilon, src, "levels")
    if n == 0:
        state.active[:] = False
    level = np.zeros(n, dtype=np.int64)
    for r in range(R):
        if not state.active.any():
            break
        at_r = level == r
        U = g.induced_degrees(at_r)
        thr = level_threshold(r, n, eta)
        ans = state.query(thr - U, label=f"r={r}")
        level[ans == 0] += 1
    final = np.minimum(level, R - 1)
    return CoreEstimates(
        algorithm="kcore-levels",
        labels=np.asarray(core_estimate_from_level(final, n, eta), dtype=np.float64).reshape(n),
        epsilon=epsilon,
        transcript=state.transcript,
        eta=eta,
        seed=_seed_of(src),
        levels=final,
    )


def level_invariant_violations(g: Graph, levels: np.ndarray, epsilon: float, eta: float, c: float = 120.0) -> list:
    """Vertices breaking the per-level neighbor-count bounds.

    Upper: a vertex at level r below the top has at most
    ``(1+psi)^floor(r / (2 log2 n)) + c ln n / eps`` neighbors at levels >= r.
    Lower: a vertex at level r > 0 has at least
    ``(1+psi)^floor((r-1) / (2 log2 n)) - c ln n / eps`` neighbors at levels >= r-1.
    """
    n = g.n
    top = round_bound(n) - 1
    slack = c * log_n(n) / epsilon
    src = np.repeat(np.arange(n), g.degrees)
    nbr_level = levels[g.indices]
    up = np.bincount(src, weights=nbr_level >= levels[src], minlength=n)
    down = np.bincount(src, weights=nbr_level >= levels[src] - 1, minlength=n)
    bad = []
    for v in range(n):
        r = int(levels[v])
        if r < top and up[v] > level_threshold(r, n, eta) + slack:
            bad.append((v, "upper"))
        if r > 0 and down[v] < level_threshold(r - 1, n, eta) - slack:
            bad.append((v, "lower"))
    return bad
