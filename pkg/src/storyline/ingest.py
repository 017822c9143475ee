"""Input data models, parsers, windowing and dataset adapters.

A temporal network arrives either as a contact sequence (timestamped pairwise
events) or as an already windowed sequence of graphs.  Everything downstream
works on :class:`GraphSequence`; :func:`build_aggregate` turns that into the
window-tagged union graph the ordering stage seriates.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .exceptions import ParseError, ValidationError

__all__ = [
    "Event",
    "EventSequence",
    "Edge",
    "WindowGraph",
    "GraphSequence",
    "AggregateGraph",
    "parse_events",
    "parse_graph_sequence",
    "partition_windows",
    "continue_storylines",
    "discretize",
    "build_aggregate",
    "parse_dialogue",
    "dialogue_to_events",
    "rankings_to_graphs",
    "parse_rankings",
    "parse_poll_csv",
]

AggNode = tuple[int, str]


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    t: float
    u: str
    v: str
    w: float = 1.0

    def __post_init__(self):
        if self.u == self.v:
            raise ValidationError(f"self-interaction on node {self.u!r} at t={self.t}")
        if not (self.w > 0):
            raise ValidationError(f"event weight must be positive, got {self.w}")
        if not math.isfinite(self.t):
            raise ValidationError(f"event time must be finite, got {self.t}")


@dataclass(frozen=True)
class EventSequence:
    """Contact sequence sorted by time.

    ``breaks``, ``labels`` and ``cyclic`` carry windowing hints that some
    input formats provide alongside the events (events JSON, dialogue acts).
    """

    events: tuple[Event, ...]
    nodes: frozenset[str]
    breaks: tuple[float, ...] | None = None
    labels: tuple[str, ...] | None = None
    cyclic: bool = False

    @classmethod
    def from_events(cls, events: Iterable[Event], nodes: Iterable[str] = (), **kw) -> "EventSequence":
        # sorted() is stable, so equal timestamps keep input order
        evs = tuple(sorted(events, key=lambda e: e.t))
        universe = set(nodes)
        for e in evs:
            universe.add(e.u)
            universe.add(e.v)
        return cls(evs, frozenset(universe), **kw)

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    w: float = 1.0
    t: float | None = None

    @property
    def key(self) -> frozenset:
        return frozenset((self.u, self.v))


@dataclass(frozen=True)
class WindowGraph:
    index: int
    label: str
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        present = set(self.nodes)
        if len(present) != len(self.nodes):
            raise ValidationError(f"window {self.index}: duplicate node ids")
        for e in self.edges:
            if e.u == e.v:
                raise ValidationError(f"window {self.index}: self-loop on {e.u!r}")
            if e.u not in present or e.v not in present:
                raise ValidationError(f"window {self.index}: edge ({e.u}, {e.v}) has an endpoint outside the window")
            if not (e.w > 0):
                raise ValidationError(f"window {self.index}: edge weight must be positive")

    def degree(self) -> dict[str, int]:
        deg = dict.fromkeys(self.nodes, 0)
        for e in self.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        return deg


@dataclass(frozen=True)
class GraphSequence:
    windows: tuple[WindowGraph, ...]
    cyclic: bool = False
    spans: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        for i, win in enumerate(self.windows):
            if win.index != i:
                raise ValidationError(f"window indices must be contiguous from 0, found {win.index} at {i}")
        if self.spans is not None:
            if len(self.spans) != len(self.windows):
                raise ValidationError("one time span per window required")
            prev_end = -math.inf
            for start, end in self.spans:
                if end < start or start < prev_end:
                    raise ValidationError("time spans must be ordered and non-overlapping")
                prev_end = end

    def __len__(self) -> int:
        return len(self.windows)

    def __iter__(self):
        return iter(self.windows)

    def __getitem__(self, i: int) -> WindowGraph:
        return self.windows[i]

    @property
    def node_universe(self) -> list[str]:
        """Node ids in order of first appearance."""
        seen: dict[str, None] = {}
        for win in self.windows:
            for v in win.nodes:
                seen.setdefault(v, None)
        return list(seen)

    def appearances(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for win in self.windows:
            for v in win.nodes:
                out.setdefault(v, []).append(win.index)
        return out

    def adjacent_pairs(self) -> list[tuple[int, int]]:
        """Adjacent window pairs in processing order, wraparound last."""
        n = len(self.windows)
        pairs = [(i, i + 1) for i in range(n - 1)]
        if self.cyclic and n > 2:
            pairs.append((n - 1, 0))
        return pairs


@dataclass(frozen=True)
class AggregateGraph:
    nodes: tuple[AggNode, ...]
    intra_edges: tuple[tuple[AggNode, AggNode, float], ...]
    continuity_edges: tuple[tuple[AggNode, AggNode, float], ...]
    n_windows: int = 0

    @property
    def edges(self):
        return self.intra_edges + self.continuity_edges

    def window_nodes(self, i: int) -> list[str]:
        return [v for (j, v) in self.nodes if j == i]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _node_id(value) -> str:
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    return str(value)


def _make_event(t, u, v, w, line: int | None) -> Event:
    try:
        return Event(float(t), _node_id(u), _node_id(v), 1.0 if w in (None, "") else float(w))
    except ValidationError as exc:
        raise ValidationError(f"line {line}: {exc}" if line else str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), line) from None


def parse_events(source: bytes | str | IO, format: str = "csv") -> EventSequence:
    """Parse a contact sequence from CSV (``t,u,v[,w]``) or events JSON.

    Rows with equal ``t`` keep their input order; duplicate rows are kept as
    separate events.
    """
    text = _read_text(source)
    if format == "json":
        return _parse_events_json(text)
    if format != "csv":
        raise ValueError(f"unknown events format {format!r}")

    rows = [(n, line) for n, line in enumerate(text.splitlines(), 1)
            if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        return EventSequence.from_events([])
    header_line, header = rows[0]
    cols = [c.strip() for c in next(csv.reader([header]))]
    if cols[:3] != ["t", "u", "v"] or len(cols) > 4 or (len(cols) == 4 and cols[3] != "w"):
        raise ParseError(f"expected header 't,u,v[,w]', got {header!r}", header_line)
    events = []
    for lineno, line in rows[1:]:
        rec = [c.strip() for c in next(csv.reader([line]))]
        if len(rec) not in (3, len(cols)):
            raise ParseError(f"expected {len(cols)} fields, got {len(rec)}", lineno)
        w = rec[3] if len(rec) > 3 else None
        events.append(_make_event(rec[0], rec[1], rec[2], w, lineno))
    return EventSequence.from_events(events)


def _parse_events_json(text: str) -> EventSequence:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("events"), list):
        raise ParseError("events JSON must be an object with an 'events' list")
    events = []
    for k, rec in enumerate(doc["events"]):
        try:
            events.append(_make_event(rec["t"], rec["u"], rec["v"], rec.get("w"), None))
        except KeyError as exc:
            raise ParseError(f"event {k} is missing field {exc}") from None
        except ValidationError as exc:
            raise ValidationError(f"event {k}: {exc}") from None
    breaks = doc.get("breaks")
    labels = doc.get("labels")
    return EventSequence.from_events(
        events,
        breaks=tuple(float(b) for b in breaks) if breaks else None,
        labels=tuple(labels) if labels else None,
        cyclic=bool(doc.get("cyclic", False)),
    )


def merge_parallel(edges: Iterable[Edge]) -> list[Edge]:
    """Merge edges on the same unordered pair: weights add, earliest time wins."""
    merged: dict[frozenset, Edge] = {}
    for e in edges:
        prev = merged.get(e.key)
        if prev is None:
            merged[e.key] = e
            continue
        if prev.t is None:
            t = e.t
        elif e.t is None:
            t = prev.t
        else:
            t = min(prev.t, e.t)
        merged[e.key] = Edge(prev.u, prev.v, prev.w + e.w, t)
    return list(merged.values())


def parse_graph_sequence(source: bytes | str | IO) -> GraphSequence:
    """Parse the windowed graph-sequence JSON format."""
    text = _read_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("windows"), list):
        raise ParseError("graph-sequence JSON must be an object with a 'windows' list")
    windows = []
    for i, win in enumerate(doc["windows"]):
        nodes = [_node_id(v) for v in win.get("nodes", [])]
        edges = []
        for rec in win.get("edges", []):
            try:
                t = rec.get("t")
                edges.append(Edge(_node_id(rec["u"]), _node_id(rec["v"]), float(rec.get("w", 1.0)),
                                  None if t is None else float(t)))
            except KeyError as exc:
                raise ParseError(f"window {i}: edge missing field {exc}") from None
        seen = set(nodes)
        for e in edges:
            for x in (e.u, e.v):
                if x not in seen:
                    seen.add(x)
                    nodes.append(x)
        windows.append(WindowGraph(i, str(win.get("label", i)), tuple(nodes), tuple(merge_parallel(edges))))
    spans = doc.get("spans")
    return GraphSequence(
        tuple(windows),
        cyclic=bool(doc.get("cyclic", False)),
        spans=tuple((float(a), float(b)) for a, b in spans) if spans else None,
    )


# ---------------------------------------------------------------------------
# Windowing
# ---------------------------------------------------------------------------


def _fmt_time(x: float) -> str:
    return f"{x:g}"


def partition_windows(
    seq: EventSequence,
    breaks: Sequence[float] | None = None,
    count: int | None = None,
    labels: Sequence[str] | None = None,
    cyclic: bool | None = None,
) -> GraphSequence:
    """Split a contact sequence into half-open time windows.

    Exactly one of ``breaks`` (strictly increasing cut points) or ``count``
    (equal-width windows over ``[t_min, t_max]``, last one closed) is used.
    Parallel events inside a window merge into one edge.
    """
    if (breaks is None) == (count is None):
        raise ValueError("give exactly one of breaks or count")
    cyclic = seq.cyclic if cyclic is None else cyclic
    times = [e.t for e in seq.events]

    if breaks is not None:
        breaks = [float(b) for b in breaks]
        if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
            raise ValueError("breaks must be strictly increasing")
        n = len(breaks) + 1
        assign = [bisect.bisect_right(breaks, t) for t in times]
        lo = min([*times, breaks[0]]) if breaks else (min(times) if times else 0.0)
        hi = max([*times, breaks[-1]]) if breaks else (max(times) if times else 0.0)
        bounds = [lo, *breaks, hi]
    else:
        if count < 1:
            raise ValueError("count must be >= 1")
        if not times:
            raise ValueError("empty sequence: cannot derive windows from event times")
        n = count
        t_min, t_max = times[0], times[-1]
        length = (t_max - t_min) / n
        if length > 0:
            assign = [min(int((t - t_min) / length), n - 1) for t in times]
        else:
            assign = [0] * len(times)
        bounds = [t_min + k * length for k in range(n)] + [t_max]

    buckets: list[list[Event]] = [[] for _ in range(n)]
    for e, k in zip(seq.events, assign):
        buckets[k].append(e)

    if labels is None:
        labels = seq.labels if seq.labels is not None and len(seq.labels) == n else None
    windows = []
    for k, evs in enumerate(buckets):
        nodes: dict[str, None] = {}
        for e in evs:
            nodes.setdefault(e.u, None)
            nodes.setdefault(e.v, None)
        edges = merge_parallel(Edge(e.u, e.v, e.w, e.t) for e in evs)
        label = labels[k] if labels is not None else f"{_fmt_time(bounds[k])}-{_fmt_time(bounds[k + 1])}"
        windows.append(WindowGraph(k, label, tuple(nodes), tuple(edges)))
    spans = tuple((bounds[k], bounds[k + 1]) for k in range(n))
    return GraphSequence(tuple(windows), cyclic=cyclic, spans=spans)


def continue_storylines(gs: GraphSequence) -> GraphSequence:
    """Add every node to the windows strictly between its first and last appearance."""
    first: dict[str, int] = {}
    last: dict[str, int] = {}
    for win in gs:
        for v in win.nodes:
            first.setdefault(v, win.index)
            last[v] = win.index
    windows = []
    for win in gs:
        present = set(win.nodes)
        extra = [v for v in first if first[v] < win.index < last[v] and v not in present]
        windows.append(replace(win, nodes=win.nodes + tuple(extra)) if extra else win)
    return replace(gs, windows=tuple(windows))


def discretize(gs: GraphSequence) -> GraphSequence:
    """Drop nodes whose degree in their window is zero."""
    windows = []
    for win in gs:
        deg = win.degree()
        kept = tuple(v for v in win.nodes if deg[v] > 0)
        windows.append(replace(win, nodes=kept) if len(kept) != len(win.nodes) else win)
    return replace(gs, windows=tuple(windows))


def build_aggregate(
    gs: GraphSequence,
    continuity_weight: float = 1.0,
    node_weights: Mapping[str, float] | None = None,
) -> AggregateGraph:
    """Window-tagged union graph with continuity edges between a node's adjacent appearances.

    ``node_weights`` overrides ``continuity_weight`` for individual node ids.
    """
    if not continuity_weight > 0:
        raise ValueError("continuity_weight must be positive")
    node_weights = node_weights or {}
    for v, c in node_weights.items():
        if not c > 0:
            raise ValueError(f"continuity weight for {v!r} must be positive")
    nodes = tuple((win.index, v) for win in gs for v in win.nodes)
    intra = tuple(((win.index, e.u), (win.index, e.v), e.w) for win in gs for e in win.edges)
    cont = []
    for i, j in gs.adjacent_pairs():
        nxt = set(gs[j].nodes)
        for v in gs[i].nodes:
            if v in nxt:
                cont.append(((i, v), (j, v), float(node_weights.get(v, continuity_weight))))
    return AggregateGraph(nodes, intra, tuple(cont), len(gs))


# ---------------------------------------------------------------------------
# Dataset adapters
# ---------------------------------------------------------------------------

_SPEAKER_RE = re.compile(r"^([A-Z][A-Z0-9'\- ]*[A-Z0-9]|[A-Z])\s*:")
_ACT_RE = re.compile(r"^\s*ACT\s+([IVXLC]+|\d+)\b")


@dataclass
class Dialogue:
    lines: list[tuple[int, str]] = field(default_factory=list)
    act_starts: list[int] = field(default_factory=list)
    act_labels: list[str] = field(default_factory=list)


def parse_dialogue(source: bytes | str | IO) -> Dialogue:
    """Extract ``(line-number, speaker)`` pairs and ``ACT`` headings from a script.

    A speaker line looks like ``SPEAKER: text``; the speaker is the leading
    uppercase run before the colon.  Other lines are ignored.
    """
    out = Dialogue()
    for n, line in enumerate(_read_text(source).splitlines(), 1):
        act = _ACT_RE.match(line)
        if act:
            out.act_starts.append(n)
            out.act_labels.append(f"Act {act.group(1)}")
            continue
        m = _SPEAKER_RE.match(line)
        if m:
            out.lines.append((n, m.group(1).strip()))
    return out


def dialogue_to_events(lines: Sequence[tuple[int, str]]) -> EventSequence:
    """One event per change of speaker, stamped with the second speaker's line."""
    events = [
        Event(float(n2), s1, s2)
        for (_, s1), (n2, s2) in zip(lines, lines[1:])
        if s1 != s2
    ]
    return EventSequence.from_events(events)


def dialogue_events(dialogue: Dialogue) -> EventSequence:
    """Events plus act breaks (first act heading is not a cut point)."""
    seq = dialogue_to_events(dialogue.lines)
    breaks = tuple(float(b) for b in dialogue.act_starts[1:])
    labels = tuple(dialogue.act_labels) if dialogue.act_starts else None
    return replace(seq, breaks=breaks or None, labels=labels if breaks else None)


def rankings_to_graphs(
    matrices: Sequence,
    epsilon: int = 2,
    labels: Sequence[str] | None = None,
    discretize_nodes: bool = True,
) -> GraphSequence:
    """Reciprocated close-ranking graphs: edge (i, j) iff both rank each other <= epsilon."""
    mats = [np.asarray(m) for m in matrices]
    if not mats:
        return GraphSequence(())
    n = mats[0].shape[0] if mats[0].ndim == 2 else -1
    for k, m in enumerate(mats):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"ranking matrix {k} is not square")
        if m.shape[0] != n:
            raise ValidationError(f"ranking matrix {k} has size {m.shape[0]}, expected {n}")
    labels = [str(x) for x in (labels if labels is not None else range(n))]
    if len(labels) != n:
        raise ValidationError("one label per ranking-matrix row required")

    windows = []
    for k, m in enumerate(mats):
        close = m <= epsilon
        mutual = np.triu(close & close.T, 1)
        edges = tuple(Edge(labels[i], labels[j]) for i, j in zip(*np.nonzero(mutual)))
        if discretize_nodes:
            touched = set(np.nonzero(mutual)[0]) | set(np.nonzero(mutual)[1])
            nodes = tuple(labels[i] for i in range(n) if i in touched)
        else:
            nodes = tuple(labels)
        windows.append(WindowGraph(k, str(k + 1), nodes, edges))
    return GraphSequence(tuple(windows))


def parse_rankings(source: bytes | str | IO) -> tuple[list, list[str] | None]:
    """Ranking-matrix JSON: ``{"matrices": [...], "labels": [...]}`` or a bare list."""
    doc = json.loads(_read_text(source))
    if isinstance(doc, list):
        return doc, None
    if "matrices" not in doc:
        raise ParseError("rankings JSON needs a 'matrices' list")
    return doc["matrices"], doc.get("labels")


def parse_poll_csv(source: bytes | str | IO) -> tuple[GraphSequence, list[list[str]]]:
    """Weekly poll CSV with header ``week,rank,team``.

    Returns one edgeless window per week plus the per-week rank order.
    """
    reader = csv.DictReader(io.StringIO(_read_text(source)))
    if reader.fieldnames is None or not {"week", "rank", "team"} <= set(reader.fieldnames):
        raise ParseError("poll CSV needs columns week,rank,team", 1)
    weeks: dict[str, list[tuple[int, str]]] = {}
    for lineno, row in enumerate(reader, 2):
        try:
            weeks.setdefault(row["week"], []).append((int(row["rank"]), row["team"].strip()))
        except (TypeError, ValueError):
            raise ParseError(f"bad rank {row.get('rank')!r}", lineno) from None
    orders = [[team for _, team in sorted(rows)] for rows in weeks.values()]
    windows = tuple(WindowGraph(i, label, tuple(order)) for i, (label, order) in enumerate(zip(weeks, orders)))
    return GraphSequence(windows), orders
