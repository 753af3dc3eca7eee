import numpy as np
import pytest
from hypothesis import strategies as st

from fora import _kernels
from fora.generate import cycle, erdos_renyi, path, star
from fora.graph import Graph

BACKENDS = _kernels.available()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def two_cycle():
    return cycle(2)


@pytest.fixture
def path2():
    return path(2)


@pytest.fixture
def star3():
    return Graph.from_edges([0, 0], [1, 2], 3)


def mixed_graph(rng, n_max=200):
    """ER, star, path or cycle, sometimes with extra dangling nodes bolted on."""
    kind = int(rng.integers(4))
    n = int(rng.integers(2, n_max + 1))
    if kind == 0:
        m = int(rng.integers(0, min(4 * n, n * (n - 1)) + 1))
        g = erdos_renyi(n, m, int(rng.integers(2**31)))
    elif kind == 1:
        g = star(n)
    elif kind == 2:
        g = path(n)
    else:
        g = cycle(n)
    if rng.random() < 0.5:
        extra = int(rng.integers(1, 5))
        src, dst = g.edges()
        hooks = rng.integers(0, g.n, extra)
        src = np.concatenate([src, hooks])
        dst = np.concatenate([dst, np.arange(g.n, g.n + extra)])
        g = Graph.from_edges(src, dst, g.n + extra)
    return g


@st.composite
def graphs(draw, max_n=25, max_m=80):
    n = draw(st.integers(1, max_n))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=max_m))
    src = [u for u, _ in edges]
    dst = [v for _, v in edges]
    return Graph.from_edges(np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), n)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
