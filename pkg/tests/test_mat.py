import json
import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from ledpgraph.mat import (
    BOT,
    INACTIVE,
    TOP,
    MatConfig,
    MatState,
    Transcript,
    crossing_indices,
    mat_init,
    mat_query,
)
from ledpgraph.noise import NoiseSource


def test_config_scales():
    cfg = MatConfig([1.0, 2.0], epsilon=0.5, sensitivity=2.0)
    assert cfg.d == 2
    assert cfg.threshold_scale == 8.0
    assert cfg.query_scale == 16.0


@pytest.mark.parametrize("kw", [dict(thresholds=[], epsilon=1, sensitivity=1),
                                dict(thresholds=[0], epsilon=0, sensitivity=1),
                                dict(thresholds=[0], epsilon=1, sensitivity=0)])
def test_config_rejects(kw):
    with pytest.raises(ValueError):
        MatConfig(**kw)


def test_zero_noise_crosses_at_first_exceeding_query():
    st_ = mat_init(MatConfig([3.0, 10.0, 0.0], 1.0, 1.0), NoiseSource.zero())
    assert st_.query([1, 1, 1]).tolist() == [0, 0, 1]
    assert st_.query([3, 9, 5]).tolist() == [1, 0, -1]
    assert st_.query([0, 10, 0]).tolist() == [-1, 1, -1]
    assert crossing_indices(st_) == [2, 3, 1]
    assert st_.transcript.crossing_round().tolist() == [1, 2, 0]


def test_query_on_subset_leaves_others_bottom():
    st_ = MatState(MatConfig([0.0] * 4, 1.0, 1.0), NoiseSource.zero())
    out = st_.query([5.0], coords=[2])
    assert out.tolist() == [0, 0, 1, 0]
    # full-length values with coords also work
    out = st_.query(np.full(4, 5.0), coords=[0, 2])
    assert out.tolist() == [1, 0, -1, 0]


def test_query_length_checked():
    st_ = MatState(MatConfig([0.0] * 3, 1.0, 1.0), NoiseSource(0))
    with pytest.raises(ValueError):
        st_.query([1.0, 2.0])
    with pytest.raises(ValueError):
        st_.query([1.0, 2.0], coords=[0])


def test_commit_rejects_inactive():
    st_ = MatState(MatConfig([0.0] * 2, 1.0, 1.0), NoiseSource(0))
    st_.commit([0])
    with pytest.raises(RuntimeError):
        st_.commit([0])


def test_mat_query_checks_source():
    src = NoiseSource(1)
    st_ = mat_init(MatConfig([0.0], 1.0, 1.0), src)
    mat_query(st_, [0.0], src)
    with pytest.raises(ValueError):
        mat_query(st_, [0.0], NoiseSource(1))


def test_transcript_roundtrip():
    st_ = MatState(MatConfig([0.0, 1.0, 100.0], 1.0, 1.0), NoiseSource.zero())
    st_.query([0.0, 0.0, 0.0])
    st_.query([0.0, 1.0, 0.0])
    st_.query([0.0, 0.0, 0.0])
    d = st_.transcript.to_dict()
    assert d["rounds"] == [[1, 0, 0], [None, 1, 0], [None, None, 0]]
    back = Transcript.from_dict(json.loads(st_.transcript.to_json()))
    assert back.to_dict() == d
    assert st_.transcript.answers(1) == [INACTIVE, TOP, BOT]


def test_noise_is_keyed_per_owner_and_query():
    src = NoiseSource(4)
    a = MatState(MatConfig(np.zeros(3), 1.0, 1.0), src, "x")
    b = MatState(MatConfig(np.zeros(3), 1.0, 1.0), src, "x", owner=[2, 1, 0])
    assert np.array_equal(a.noisy_thresholds[::-1], b.noisy_thresholds)
    first = a.query_noise(np.arange(3))
    a.query(np.zeros(3))
    assert not np.array_equal(first, a.query_noise(np.arange(3)))


def single_crossing_probability(f, T, eps, D):
    """Pr[f + Lap(4D/eps) >= T + Lap(2D/eps)] by numerical convolution."""
    nu, rho = stats.laplace(scale=4 * D / eps), stats.laplace(scale=2 * D / eps)
    val, _ = integrate.quad(lambda r: rho.pdf(r) * nu.sf(T + r - f), -np.inf, np.inf, limit=200)
    return val


@pytest.mark.parametrize("f,T", [(0.0, 0.0), (2.0, 5.0), (5.0, 1.0)])
def test_first_query_crossing_probability(f, T):
    eps, D, trials = 1.0, 1.0, 40_000
    st_ = MatState(MatConfig(np.full(trials, T), eps, D), NoiseSource(12))
    hit = np.mean(st_.query(np.full(trials, f)) == TOP)
    p = single_crossing_probability(f, T, eps, D)
    assert abs(hit - p) < 4 * np.sqrt(p * (1 - p) / trials) + 1e-3


@settings(max_examples=100, deadline=None)
@given(
    d=st.integers(1, 6),
    seed=st.integers(0, 2**31),
    steps=st.integers(1, 12),
    eps=st.floats(0.2, 5.0),
)
def test_release_pattern(d, seed, steps, eps):
    rng = np.random.default_rng(seed)
    st_ = MatState(MatConfig(rng.normal(0, 3, d), eps, 1.0), NoiseSource(seed))
    rows = []
    for _ in range(steps):
        # adaptive: the next query depends on the answers so far
        f = rng.normal(0, 3, d) + 2.0 * (~st_.active)
        rows.append(st_.query(f))
    for col in np.array(rows).T:
        s = "".join({0: "b", 1: "t", -1: "i"}[int(a)] for a in col)
        assert re.fullmatch(r"b*(ti*)?", s), s
