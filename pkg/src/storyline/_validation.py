"""Input checks shared by the estimator and the CLI."""

from __future__ import annotations

from typing import Iterable

from .exceptions import ValidationError
from .ingest import EventSequence, GraphSequence, partition_windows


def check_choice(name: str, value, options: Iterable):
    options = tuple(options)
    if value not in options:
        raise ValidationError(f"{name} must be one of {', '.join(map(str, options))}; got {value!r}")
    return value


def check_positive(name: str, value, strict: bool = True) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got {value!r}") from None
    if value < 0 or (strict and value == 0):
        raise ValidationError(f"{name} must be {'positive' if strict else 'non-negative'}, got {value}")
    return value


def check_graph_sequence(X, breaks=None, window_count=None, cyclic=None) -> GraphSequence:
    """Coerce events or graphs into a non-empty :class:`GraphSequence`.

    Events are windowed by ``breaks`` or ``window_count``; without either
    the hints carried by the event sequence are used, else one window.
    """
    if isinstance(X, EventSequence):
        if len(X) == 0:
            raise ValidationError("empty sequence: no events to lay out")
        if breaks is not None and window_count is not None:
            raise ValidationError("give breaks or window_count, not both")
        if breaks is None and window_count is None:
            if X.breaks:
                breaks = X.breaks
            else:
                window_count = 1
        try:
            X = partition_windows(X, breaks=breaks, count=window_count)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
    elif not isinstance(X, GraphSequence):
        raise ValidationError(f"expected an EventSequence or GraphSequence, got {type(X).__name__}")
    if len(X) == 0 or not any(win.nodes for win in X):
        raise ValidationError("empty sequence: no nodes to lay out")
    if cyclic is not None and cyclic != X.cyclic:
        from dataclasses import replace

        X = replace(X, cyclic=bool(cyclic))
    return X
