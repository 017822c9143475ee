"""Storyline layouts for temporal networks.

The pipeline windows a contact sequence into a graph sequence, orders the
nodes of every window by seriating the aggregate graph, aligns appearances
of the same node across windows, assigns integer levels with a network
simplex solver and renders the result as metro-map style SVG.
"""

from __future__ import annotations

from .estimator import StorylineLayout
from .exceptions import (
    ConstraintCycleError,
    ParseError,
    SeriationError,
    StageError,
    StorylineError,
    ValidationError,
)
from .ingest import Event, EventSequence, GraphSequence, WindowGraph
from .metrics import LayoutMetrics, compute_metrics
from .placement import Layout
from .render import StyleConfig, export_layout_json, parse_layout_json, render_svg

__version__ = "0.1.0"

__all__ = [
    "StorylineLayout",
    "Event",
    "EventSequence",
    "GraphSequence",
    "WindowGraph",
    "Layout",
    "LayoutMetrics",
    "StyleConfig",
    "compute_metrics",
    "render_svg",
    "export_layout_json",
    "parse_layout_json",
    "StorylineError",
    "ParseError",
    "ValidationError",
    "SeriationError",
    "ConstraintCycleError",
    "StageError",
]
