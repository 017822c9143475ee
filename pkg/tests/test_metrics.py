from __future__ import annotations

import numpy as np
from hypothesis import given, strategies as st

from storyline import StorylineLayout, compute_metrics
from storyline.datasets import load_crossings_toy
from storyline.placement import Layout, NodePos, WindowBox

from conftest import graph_sequences, make_gs
from oracles import brute_force_metrics


def random_layout(gs, rng):
    """Arbitrary y values, distinct within each window."""
    boxes = tuple(WindowBox(str(i), i * 10.0, (i + 1) * 10.0) for i in range(len(gs)))
    nodes = []
    for w in gs:
        ys = rng.choice(3 * len(w.nodes) + 1, len(w.nodes), replace=False)
        nodes += [NodePos(v, w.index, int(y)) for v, y in zip(w.nodes, ys)]
    return Layout(boxes, tuple(nodes))


def test_crossings_toy():
    gs, opts = load_crossings_toy()
    m = StorylineLayout(**opts).fit(gs).metrics_
    assert (m.node_node_crossings, m.node_edge_crossings) == (1, 1)


def test_single_aligned_node():
    gs = make_gs([(["v"], [])] * 4)
    m = StorylineLayout().fit(gs).metrics_
    assert m.wiggles == 0 and m.node_node_crossings == 0 and m.aligned_pairs == 3


@given(graph_sequences(max_nodes=8), st.integers(0, 2**31))
def test_brute_force_oracle(gs, seed):
    lay = random_layout(gs, np.random.default_rng(seed))
    m = compute_metrics(lay, gs)
    assert (m.node_node_crossings, m.node_edge_crossings, m.wiggles, m.weighted_length) == brute_force_metrics(lay, gs)


@given(graph_sequences())
def test_non_negative(gs):
    m = StorylineLayout().fit(gs).metrics_
    assert min(m.node_node_crossings, m.node_edge_crossings, m.wiggles, m.weighted_length) >= 0
    assert m.clutter == m.node_node_crossings + m.wiggles


def test_to_dict_keys():
    gs = make_gs([(["a", "b"], [("a", "b", 1.0)])])
    d = StorylineLayout().fit(gs).metrics_.to_dict()
    assert list(d) == ["nodeNodeCrossings", "nodeEdgeCrossings", "wiggles", "weightedLength", "stageMillis"]
    assert set(d["stageMillis"]) == {"ingest", "order", "align", "place"}
