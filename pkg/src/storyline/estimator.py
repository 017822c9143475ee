"""Estimator-style front end for the five-stage storyline layout."""

from __future__ import annotations

import time
from contextlib import contextmanager

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import alignment, ingest, ordering, placement
from ._runtime import gc_paused
from ._validation import check_choice, check_graph_sequence, check_positive
from .exceptions import StageError, StorylineError, ValidationError
from .metrics import compute_metrics

__all__ = ["StorylineLayout", "ORDERING_METHODS", "ALIGN_WEIGHT_MODES"]

ORDERING_METHODS = ("spectral", "dendrogram", "given", "identity")
ALIGN_WEIGHT_MODES = ("uniform", "rank-increase", "file", "none")


@contextmanager
def _stage(name: str, timings: dict):
    start = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except (StorylineError, ValueError, RuntimeError) as exc:
        raise StageError(name, exc) from exc
    finally:
        timings[name] = timings.get(name, 0.0) + (time.perf_counter() - start) * 1000.0


def _alignment_weight_map(doc) -> tuple[dict, float]:
    if doc is None:
        return {}, 1.0
    if "weights" in doc:
        return {str(k): float(v) for k, v in doc["weights"].items()}, float(doc.get("default", 1.0))
    return {str(k): float(v) for k, v in doc.items()}, 1.0


class StorylineLayout(TransformerMixin, BaseEstimator):
    """Lay out a temporal network as horizontal storylines.

    ``fit`` runs ingest, order, align and place on an
    :class:`~storyline.ingest.EventSequence` or
    :class:`~storyline.ingest.GraphSequence`; ``transform`` returns the
    resulting :class:`~storyline.placement.Layout`.

    Parameters
    ----------
    breaks, window_count : windowing for event input (one or neither).
    continuation : add nodes to the windows between their first and last appearance.
    discretize : drop degree-0 nodes from each window.
    cyclic : treat the last window as adjacent to the first; ``None`` keeps the input's flag.
    continuity_weight : weight of the edges linking a node's adjacent appearances.
    node_continuity_weights : per-node override of ``continuity_weight``.
    ordering : ``"spectral"``, ``"dendrogram"``, ``"given"`` or ``"identity"``.
    given_order : per-window node lists (required for ``"given"``).
    tree : optional nested-pair dendrogram for ``"dendrogram"``.
    align_weight_mode : ``"uniform"``, ``"rank-increase"``, ``"file"`` or ``"none"`` (no alignment).
    align_weights : ``{"weights": {...}, "default": w}`` for ``"file"`` mode.
    wiggle_weight : per-level cost of height changes for unaligned appearances (0 ignores them).
    min_separation : minimum level gap between neighbours in a window.
    window_width, x_policy : horizontal placement, see :func:`~storyline.placement.assign_positions`.

    Attributes
    ----------
    graphs_ : GraphSequence after windowing/continuation/discretization.
    aggregate_ : AggregateGraph.
    ordering_ : Ordering.
    selections_ : dict mapping window pairs to the aligned node ids.
    classes_ : AlignmentClasses.
    dag_ : ConstraintDag.
    levels_ : LevelAssignment.
    layout_ : Layout.
    metrics_ : LayoutMetrics.
    stage_millis_ : wall time per stage.
    """

    def __init__(
        self,
        breaks=None,
        window_count=None,
        continuation=False,
        discretize=False,
        cyclic=None,
        continuity_weight=1.0,
        node_continuity_weights=None,
        ordering="spectral",
        given_order=None,
        tree=None,
        align_weight_mode="uniform",
        align_weights=None,
        wiggle_weight=0.0,
        min_separation=1,
        window_width=placement.DEFAULT_WINDOW_WIDTH,
        x_policy="auto",
    ):
        self.breaks = breaks
        self.window_count = window_count
        self.continuation = continuation
        self.discretize = discretize
        self.cyclic = cyclic
        self.continuity_weight = continuity_weight
        self.node_continuity_weights = node_continuity_weights
        self.ordering = ordering
        self.given_order = given_order
        self.tree = tree
        self.align_weight_mode = align_weight_mode
        self.align_weights = align_weights
        self.wiggle_weight = wiggle_weight
        self.min_separation = min_separation
        self.window_width = window_width
        self.x_policy = x_policy

    def _check_params(self):
        check_choice("ordering", self.ordering, ORDERING_METHODS)
        check_choice("align_weight_mode", self.align_weight_mode, ALIGN_WEIGHT_MODES)
        check_choice("x_policy", self.x_policy, ("auto", "midpoint", "event-time"))
        check_positive("continuity_weight", self.continuity_weight)
        check_positive("window_width", self.window_width)
        check_positive("wiggle_weight", self.wiggle_weight, strict=False)
        if int(self.min_separation) < 1:
            raise ValidationError("min_separation must be >= 1")
        if self.ordering == "given" and self.given_order is None:
            raise ValidationError("ordering='given' needs given_order")
        if self.align_weight_mode == "file" and self.align_weights is None:
            raise ValidationError("align_weight_mode='file' needs align_weights")

    def fit(self, X, y=None):
        with gc_paused():
            return self._fit(X)

    def _fit(self, X):
        timings: dict[str, float] = {}
        with _stage("ingest", timings):
            self._check_params()
            gs = check_graph_sequence(X, self.breaks, self.window_count, self.cyclic)
            if self.continuation:
                gs = ingest.continue_storylines(gs)
            if self.discretize:
                gs = ingest.discretize(gs)
            if not any(win.nodes for win in gs):
                raise ValidationError("empty sequence: every node was discretized away")
            agg = ingest.build_aggregate(gs, self.continuity_weight, self.node_continuity_weights)

        with _stage("order", timings):
            self.dendrogram_ = None
            if self.ordering == "spectral":
                ordr = ordering.spectral_order(agg)
            elif self.ordering == "dendrogram":
                ordr, self.dendrogram_ = ordering.dendrogram_order(agg, self.tree)
            elif self.ordering == "given":
                orders = self.given_order
                if isinstance(orders, dict):
                    orders = orders["orders"]
                ordr = ordering.apply_given_order(gs, orders)
            else:
                ordr = ordering.identity_order(gs)

        with _stage("align", timings):
            mode = self.align_weight_mode
            if mode == "none":
                selections = {pair: set() for pair in gs.adjacent_pairs()}
                classes = alignment.build_alignment_classes(ordr, selections)
                graphs = []
            else:
                if mode == "rank-increase":
                    weights = alignment.rank_increase_weights(ordr, gs.adjacent_pairs())
                elif mode == "file":
                    wmap, default = _alignment_weight_map(self.align_weights)
                    weights = {pair: {v: wmap.get(v, default) for v in ordr.orders[pair[0]]}
                               for pair in gs.adjacent_pairs()}
                else:
                    weights = None
                selections, classes, graphs = alignment.align(gs, ordr, weights)

        with _stage("place", timings):
            dag = placement.build_constraint_dag(
                ordr, classes, gs, wiggle_weight=float(self.wiggle_weight),
                min_separation=int(self.min_separation),
            )
            levels = placement.network_simplex_levels(dag)
            layout = placement.assign_positions(gs, ordr, classes, levels, float(self.window_width), self.x_policy)

        self.graphs_ = gs
        self.aggregate_ = agg
        self.ordering_ = ordr
        self.constraint_graphs_ = graphs
        self.selections_ = selections
        self.classes_ = classes
        self.dag_ = dag
        self.levels_ = levels
        self.layout_ = layout
        self.stage_millis_ = timings
        self.metrics_ = compute_metrics(layout, gs, classes, timings)
        return self

    def transform(self, X=None):
        check_is_fitted(self, "layout_")
        return self.layout_

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y).layout_

    def score(self, X=None, y=None) -> float:
        """Negative clutter (node-node crossings + wiggles); higher is better."""
        check_is_fitted(self, "layout_")
        return -float(self.metrics_.clutter)
