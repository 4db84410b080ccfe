import numpy as np
import pytest

from ledpgraph import _backend
from ledpgraph.graph import Graph, clique, disjoint_union, path

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    print(line)
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=_backend.AVAILABLE)
def backend(request):
    """Run a test once per available kernel backend."""
    prev = _backend.name()
    _backend.use(request.param)
    yield request.param
    _backend.use(prev)


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k5_path5():
    return disjoint_union(clique(5), path(5))


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    """Independent G(n, p) built from numpy's generator (not the package's)."""
    iu, iv = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return Graph.from_edges(n, np.stack([iu[keep], iv[keep]], axis=1))
