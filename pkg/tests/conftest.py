from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from netprebunk.graph import Graph, NodeParams


def random_graph(rng: np.random.Generator, n: int, m: int, p_low: float = 0.1,
                 p_high: float = 1.0, p_minus: bool = False) -> Graph:
    """Random simple digraph with up to ``m`` edges."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    m = min(m, len(pairs))
    idx = rng.choice(len(pairs), size=m, replace=False)
    edges = []
    for i in sorted(idx.tolist()):
        u, v = pairs[i]
        pp = float(rng.uniform(p_low, p_high))
        pm = float(rng.uniform(p_low, p_high)) if p_minus else pp
        edges.append((u, v, pp, pm))
    return Graph.from_edges([f"v{i}" for i in range(n)], edges)


def random_params(rng: np.random.Generator, n: int) -> NodeParams:
    return NodeParams(rng.uniform(0, 1, n), rng.uniform(0, 1, n))


def random_in_tree(rng: np.random.Generator, n: int, p_low: float = 0.05) -> Graph:
    """In-arborescence rooted at node 0: node i > 0 points at an earlier node."""
    edges = []
    for i in range(1, n):
        p = float(rng.uniform(p_low, 1.0))
        edges.append((i, int(rng.integers(0, i)), p, p))
    return Graph.from_edges([f"t{i}" for i in range(n)], edges)


@st.composite
def small_instances(draw, max_nodes: int = 6, max_edges: int = 9):
    """(graph, params, seeds, x) within the exact enumeration budget."""
    n = draw(st.integers(2, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=max_edges, unique=True))
    prob = st.floats(0.05, 1.0, allow_nan=False)
    edges = [(u, v, p, p) for (u, v), p in zip(chosen, draw(st.lists(prob, min_size=len(chosen),
                                                                   max_size=len(chosen))))]
    graph = Graph.from_edges([str(i) for i in range(n)], edges)
    unit = st.floats(0.0, 1.0, allow_nan=False)
    q = draw(st.lists(unit, min_size=n, max_size=n))
    eps = draw(st.lists(unit, min_size=n, max_size=n))
    seeds = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=2, unique=True))
    rest = [v for v in range(n) if v not in seeds]
    x = draw(st.lists(st.sampled_from(rest), unique=True, max_size=len(rest))) if rest else []
    return graph, NodeParams(q, eps), sorted(seeds), sorted(x)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def chain(n: int, p: float = 1.0) -> Graph:
    return Graph.from_edges([str(i) for i in range(n)], [(i, i + 1, p, p) for i in range(n - 1)])


# acceptance criteria report: one line per criterion in the terminal summary
ACCEPTANCE: dict[str, str] = {}


def record(criterion: str, ok: bool, detail: str) -> bool:
    line = f"{criterion} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:].split(".")[0])):
        terminalreporter.write_line(ACCEPTANCE[key])
