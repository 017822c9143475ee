from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from storyline.ingest import Edge, GraphSequence, WindowGraph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

NODE_IDS = [f"v{k}" for k in range(8)]


def make_gs(windows, cyclic=False) -> GraphSequence:
    """Build a GraphSequence from ``[(nodes, [(u, v, w), ...]), ...]``."""
    wins = []
    for i, (nodes, edges) in enumerate(windows):
        wins.append(WindowGraph(i, str(i), tuple(nodes), tuple(Edge(u, v, w) for u, v, w in edges)))
    return GraphSequence(tuple(wins), cyclic=cyclic)


def random_gs(rng: np.random.Generator, n_windows: int, n_nodes: int, p_node=0.6, p_edge=0.3,
              cyclic=False, isolated=True) -> GraphSequence:
    ids = [f"v{k}" for k in range(n_nodes)]
    windows = []
    for _ in range(n_windows):
        nodes = [v for v in ids if rng.random() < p_node]
        if not nodes:
            nodes = [ids[int(rng.integers(n_nodes))]]
        rng.shuffle(nodes)
        edges = [(a, b, float(rng.integers(1, 4)))
                 for x, a in enumerate(nodes) for b in nodes[x + 1:] if rng.random() < p_edge]
        if not isolated:
            touched = {a for a, b, _ in edges} | {b for a, b, _ in edges}
            nodes = [v for v in nodes if v in touched]
        windows.append((nodes, edges))
    return make_gs(windows, cyclic)


@st.composite
def graph_sequences(draw, max_windows=5, max_nodes=7, cyclic=None, isolated=True):
    seed = draw(st.integers(0, 2**32 - 1))
    n_windows = draw(st.integers(1, max_windows))
    n_nodes = draw(st.integers(2, max_nodes))
    cyc = draw(st.booleans()) if cyclic is None else cyclic
    return random_gs(np.random.default_rng(seed), n_windows, n_nodes, cyclic=cyc, isolated=isolated)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
