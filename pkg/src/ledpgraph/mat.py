"""Multidimensional AboveThreshold.

``d`` noisy threshold monitors share one sensitivity bound ``D``. Each
coordinate answers bottom until its first top, then goes quiet. The engine
only sees real-valued query answers; callers evaluate the queries on the
graph and know ``D``.

Local framing: every coordinate has an owning vertex (``owner``) and an
index within that vertex (``sub``); noise for a coordinate is drawn from the
owner's substream, so each vertex can run its own share of the mechanism.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .noise import NoiseSource

BOT, TOP, INACTIVE = 0, 1, None


@dataclass(frozen=True)
class MatConfig:
    thresholds: np.ndarray
    epsilon: float
    sensitivity: float

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.thresholds, dtype=np.float64))
        object.__setattr__(self, "thresholds", t)
        if t.ndim != 1 or len(t) < 1:
            raise ValueError("MAT needs at least one coordinate")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.sensitivity > 0:
            raise ValueError("sensitivity must be positive")

    @property
    def d(self) -> int:
        return len(self.thresholds)

    @property
    def threshold_scale(self) -> float:
        return 2.0 * self.sensitivity / self.epsilon

    @property
    def query_scale(self) -> float:
        return 4.0 * self.sensitivity / self.epsilon


@dataclass
class Transcript:
    """Released answers, stored as the coordinates that answered top each round.

    Every round of a MAT run releases, for each coordinate, bottom, top or
    inactive, and the pattern per coordinate is always bottom* top? inactive*,
    so the per-round top lists determine the full answer matrix.
    """

    d: int
    epsilon: float
    sensitivity: float
    crossings: list = field(default_factory=list)
    labels: list = field(default_factory=list)

    @property
    def round_count(self) -> int:
        return len(self.crossings)

    def append(self, crossed, label: str = "") -> None:
        self.crossings.append(np.asarray(crossed, dtype=np.int64))
        self.labels.append(label)

    def crossing_round(self) -> np.ndarray:
        """Round (0-based) in which each coordinate answered top, -1 if never."""
        out = np.full(self.d, -1, dtype=np.int64)
        for r, crossed in enumerate(self.crossings):
            out[crossed] = r
        return out

    def answers(self, r: int) -> list:
        cr = self.crossing_round()
        return [
            INACTIVE if 0 <= c < r else (TOP if c == r else BOT) for c in cr.tolist()
        ]

    def to_dict(self) -> dict:
        cr = self.crossing_round()
        rounds = []
        for r in range(self.round_count):
            row = np.where(cr == r, 1, 0).astype(object)
            row[(cr >= 0) & (cr < r)] = None
            rounds.append(row.tolist())
        return {"rounds": rounds, "d": self.d, "epsilon": self.epsilon, "sensitivity": self.sensitivity}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Transcript":
        tr = cls(int(data["d"]), float(data["epsilon"]), float(data["sensitivity"]))
        for row in data["rounds"]:
            tr.append([j for j, a in enumerate(row) if a == TOP])
        return tr


class MatState:
    """Running state of one MAT instance.

    Attributes:
        noisy_thresholds: ``T_j + Lap(2D/eps)`` drawn once per coordinate.
        active: coordinates still answering queries.
        crossing_index: 1-based query index of the top answer, 0 if unset.
        query_count: number of query vectors answered so far.
        transcript: every released round.
    """

    def __init__(self, cfg: MatConfig, src: NoiseSource, name: str = "mat", owner=None, sub=None):
        self.cfg = cfg
        self.src = src
        self.name = name
        d = cfg.d
        self.owner = np.arange(d, dtype=np.int64) if owner is None else np.asarray(owner, dtype=np.int64)
        self.sub = np.zeros(d, dtype=np.int64) if sub is None else np.asarray(sub, dtype=np.int64)
        if self.owner.shape != (d,) or self.sub.shape != (d,):
            raise ValueError("owner/sub must have one entry per coordinate")
        self.noisy_thresholds = cfg.thresholds + src.laplace(
            cfg.threshold_scale, f"{name}/threshold", self.owner, 0, self.sub
        )
        self.active = np.ones(d, dtype=bool)
        self.crossing_index = np.zeros(d, dtype=np.int64)
        self.query_count = 0
        self.transcript = Transcript(d, cfg.epsilon, cfg.sensitivity)

    @property
    def d(self) -> int:
        return self.cfg.d

    def query_noise(self, coords: np.ndarray) -> np.ndarray:
        """Noise for query ``query_count + 1`` on ``coords``."""
        return self.src.laplace(
            self.cfg.query_scale, f"{self.name}/query", self.owner[coords], self.query_count + 1, self.sub[coords]
        )

    def query(self, f, coords=None, label: str = "") -> np.ndarray:
        """Answer one query vector.

        Args:
            f: query values, either length ``d`` or aligned with ``coords``.
            coords: optional subset of coordinates to evaluate; active
                coordinates outside it release bottom without drawing noise.

        Returns:
            int8 array: 1 top, 0 bottom, -1 inactive.
        """
        f = np.asarray(f, dtype=np.float64)
        if coords is None:
            if f.shape != (self.d,):
                raise ValueError(f"query has length {f.shape}, expected ({self.d},)")
            coords = np.flatnonzero(self.active)
            vals = f[coords]
        else:
            coords = np.asarray(coords, dtype=np.int64)
            if f.shape == (self.d,):
                vals = f[coords]
            elif f.shape == coords.shape:
                vals = f
            else:
                raise ValueError("query values must have length d or match coords")
            keep = self.active[coords]
            coords, vals = coords[keep], vals[keep]
        crossed = coords[vals + self.query_noise(coords) >= self.noisy_thresholds[coords]]
        out = np.where(self.active, BOT, -1).astype(np.int8)
        out[crossed] = TOP
        self.commit(crossed, label)
        return out

    def commit(self, crossed, label: str = "") -> None:
        """Record one round whose top answers were decided by ``crossed``."""
        crossed = np.asarray(crossed, dtype=np.int64)
        self.query_count += 1
        if len(crossed) and not self.active[crossed].all():
            raise RuntimeError("an inactive coordinate cannot answer top")
        self.active[crossed] = False
        self.crossing_index[crossed] = self.query_count
        self.transcript.append(crossed, label)


def mat_init(cfg: MatConfig, src: NoiseSource, name: str = "mat", owner=None, sub=None) -> MatState:
    return MatState(cfg, src, name, owner, sub)


def mat_query(state: MatState, f, src: NoiseSource | None = None, coords=None) -> np.ndarray:
    if src is not None and src is not state.src:
        raise ValueError("a MAT instance draws all noise from the source it was created with")
    return state.query(f, coords)


def crossing_indices(state: MatState) -> list:
    """1-based query index at which each coordinate answered top, or None."""
    return [int(c) if c else None for c in state.crossing_index]
