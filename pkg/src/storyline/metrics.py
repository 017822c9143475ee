"""Clutter measures of a finished layout."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from .alignment import AlignmentClasses
from .ingest import GraphSequence
from .placement import Layout

__all__ = ["LayoutMetrics", "compute_metrics"]


@dataclass
class LayoutMetrics:
    node_node_crossings: int = 0
    node_edge_crossings: int = 0
    wiggles: int = 0
    weighted_length: float = 0.0
    aligned_pairs: int = 0
    stage_millis: dict[str, float] = field(default_factory=dict)

    @property
    def clutter(self) -> int:
        return self.node_node_crossings + self.wiggles

    def to_dict(self) -> dict:
        return {
            "nodeNodeCrossings": self.node_node_crossings,
            "nodeEdgeCrossings": self.node_edge_crossings,
            "wiggles": self.wiggles,
            "weightedLength": self.weighted_length,
            "stageMillis": dict(self.stage_millis),
        }


def compute_metrics(
    layout: Layout,
    gs: GraphSequence,
    classes: AlignmentClasses | None = None,
    stage_millis: dict[str, float] | None = None,
) -> LayoutMetrics:
    """Count crossings, wiggles and weighted edge length.

    * node-node: pairs of shared nodes whose vertical order flips between
      adjacent windows;
    * node-edge: a node line strictly between the two endpoint levels of an
      edge in the same window;
    * wiggle: a node at different heights in adjacent windows.
    """
    out = LayoutMetrics(stage_millis=dict(stage_millis or {}))
    n = len(layout.windows)
    for i in range(n - 1):
        here = {p.id: p.y for p in layout.window_nodes(i)}
        there = {p.id: p.y for p in layout.window_nodes(i + 1)}
        shared = [v for v in here if v in there]
        if not shared:
            continue
        a = np.array([here[v] for v in shared])
        b = np.array([there[v] for v in shared])
        flips = np.sign(a[:, None] - a[None, :]) * np.sign(b[:, None] - b[None, :]) < 0
        out.node_node_crossings += int(flips.sum()) // 2
        out.wiggles += int((a != b).sum())
        if classes is not None:
            out.aligned_pairs += sum(classes(i, v) == classes(i + 1, v) for v in shared)

    for i in range(n):
        ys = sorted(p.y for p in layout.window_nodes(i))
        for e in gs[i].edges:
            lo, hi = sorted((layout.y(i, e.u), layout.y(i, e.v)))
            out.node_edge_crossings += max(0, bisect.bisect_left(ys, hi) - bisect.bisect_right(ys, lo))
            out.weighted_length += e.w * (hi - lo)
    return out
