import numpy as np
import pytest
from hypothesis import strategies as st

from expmc.graph import SparseSymmetric, split

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def edge_graph(n, edges, weights=None, diag=None):
    r = [e[0] for e in edges]
    c = [e[1] for e in edges]
    w = list(weights) if weights is not None else [1.0] * len(edges)
    if diag is not None:
        for i, x in enumerate(diag):
            if x != 0:
                r.append(i)
                c.append(i)
                w.append(x)
    return SparseSymmetric.from_entries(n, r, c, w)


def ring(n, k=1):
    return edge_graph(n, [(i, (i + s) % n) for i in range(n) for s in range(1, k + 1)])


def complete(n):
    return edge_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture
def single_edge():
    return split(edge_graph(2, [(0, 1)]))


@pytest.fixture
def star4():
    return split(edge_graph(5, [(0, i) for i in range(1, 5)]))


@pytest.fixture
def path3():
    return split(edge_graph(3, [(0, 1), (1, 2)]))


@pytest.fixture
def k4():
    return split(complete(4))


def random_graph(rng, n, p=0.4, weighted=False, diagonal=False, connected=True):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    if connected:
        # spanning path keeps every node reachable
        edges = sorted(set(edges) | {(i, i + 1) for i in range(n - 1)})
    w = rng.uniform(0.2, 2.0, len(edges)) if weighted else None
    diag = rng.uniform(-1.0, 1.0, n) if diagonal else None
    return edge_graph(n, edges, w, diag)


@st.composite
def small_graphs(draw, max_n=8, weighted=None):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, keep in zip(pairs, mask) if keep]
    use_w = draw(st.booleans()) if weighted is None else weighted
    if use_w:
        w = draw(st.lists(st.floats(0.1, 5.0), min_size=len(edges), max_size=len(edges)))
    else:
        w = None
    diag = draw(st.lists(st.sampled_from([0.0, 0.0, 1.0, -0.5, 2.0]), min_size=n, max_size=n))
    return edge_graph(n, edges, w, diag)
