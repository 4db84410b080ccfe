"""Locally edge-private graph algorithms built on multidimensional AboveThreshold."""

from . import _backend
from .coloring import Coloring, DefectReport, defect_of, dp_color, dp_color_low_rounds
from .densest import (
    RRGraph,
    densest_from_cores,
    estimate_edges,
    one_round_densest,
    randomize_response,
)
from .graph import (
    CapExceeded,
    DensityReport,
    Graph,
    GraphFormatError,
    GraphStats,
    density_of,
    exact_core_numbers,
    exact_densest_subset,
    graph_stats,
    load_edge_list,
    parse_edge_list,
    parse_generator,
)
from .kcore import (
    CoreEstimates,
    PeelConfig,
    dp_core_additive,
    dp_core_levels,
    dp_core_multiplicative,
    fast_peel_phase,
)
from .mat import MatConfig, MatState, Transcript, crossing_indices, mat_init, mat_query
from .noise import NoiseSource
from .ordering import Ordering, OrientationReport, dp_ordering, dp_ordering_low_rounds, orientation_outdegrees

__version__ = "0.1.0"


def backend() -> str:
    """Name of the active kernel backend: ``"compiled"`` or ``"python"``."""
    return _backend.name()


__all__ = [
    "CapExceeded", "Coloring", "CoreEstimates", "DefectReport", "DensityReport", "Graph",
    "GraphFormatError", "GraphStats", "MatConfig", "MatState", "NoiseSource", "Ordering",
    "OrientationReport", "PeelConfig", "RRGraph", "Transcript", "backend", "crossing_indices",
    "defect_of", "densest_from_cores", "density_of", "dp_color", "dp_color_low_rounds",
    "dp_core_additive", "dp_core_levels", "dp_core_multiplicative", "dp_ordering",
    "dp_ordering_low_rounds", "estimate_edges", "exact_core_numbers", "exact_densest_subset",
    "fast_peel_phase", "graph_stats", "load_edge_list", "mat_init", "mat_query",
    "one_round_densest", "orientation_outdegrees", "parse_edge_list", "parse_generator",
    "randomize_response",
]
