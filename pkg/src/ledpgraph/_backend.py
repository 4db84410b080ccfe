"""Kernel backend selection.

The compiled extension is used when it imports; set ``LEDPGRAPH_PURE_PYTHON=1``
to force the numpy fallback. ``use(name)`` switches at runtime (tests and the
benchmark compare both).
"""

from __future__ import annotations

import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

AVAILABLE = ("compiled", "python") if _compiled is not None else ("python",)

_impl = _fallback if (_compiled is None or os.environ.get("LEDPGRAPH_PURE_PYTHON")) else _compiled


def name() -> str:
    return "compiled" if _impl is _compiled else "python"


def use(backend: str) -> None:
    global _impl
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _impl = _compiled
    elif backend == "python":
        _impl = _fallback
    else:
        raise ValueError(f"unknown backend {backend!r}")


def module(backend: str):
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    return _fallback


def core_numbers(n, indptr, indices):
    return _impl.core_numbers(n, indptr, indices)


def subset_edge_counts(adj_masks, n, start, low):
    return _impl.subset_edge_counts(adj_masks, n, start, low)


def fast_peel_phase(n, indptr, indices, alive, thresholds, b, base, zero_noise):
    return _impl.fast_peel_phase(n, indptr, indices, alive, thresholds, b, base, zero_noise)
