"""Vertical levels and horizontal positions for every node appearance."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .alignment import AlignmentClasses
from .exceptions import ConstraintCycleError
from .ingest import GraphSequence
from .ordering import Ordering
from .simplex import assignment_cost, solve_ranks

__all__ = [
    "ConstraintDag",
    "LevelAssignment",
    "WindowBox",
    "NodePos",
    "EdgePos",
    "Layout",
    "build_constraint_dag",
    "network_simplex_levels",
    "assign_positions",
    "unit_levels",
]

DEFAULT_WINDOW_WIDTH = 120.0


@dataclass(frozen=True)
class ConstraintDag:
    """Weighted DAG over alignment classes (plus any auxiliary wiggle vertices).

    Arcs are ``(tail, head, weight, minlen)`` sorted by ``(tail, head)``.
    """

    n_vertices: int
    arcs: tuple[tuple[int, int, float, int], ...]
    n_classes: int = -1

    def __post_init__(self):
        if self.n_classes < 0:
            object.__setattr__(self, "n_classes", self.n_vertices)

    def arc_map(self) -> dict[tuple[int, int], tuple[float, int]]:
        return {(t, h): (w, m) for t, h, w, m in self.arcs}


@dataclass(frozen=True)
class LevelAssignment:
    level: tuple[int, ...]
    cost: float
    pivots: int = 0

    def __getitem__(self, c: int) -> int:
        return self.level[c]


def _find_cycle(n: int, succ: list[list[int]]) -> list[int]:
    color = [0] * n
    for s in range(n):
        if color[s]:
            continue
        stack = [(s, iter(succ[s]))]
        path = [s]
        color[s] = 1
        while stack:
            v, it = stack[-1]
            for x in it:
                if color[x] == 1:
                    return path[path.index(x):] + [x]
                if color[x] == 0:
                    color[x] = 1
                    path.append(x)
                    stack.append((x, iter(succ[x])))
                    break
            else:
                color[v] = 2
                path.pop()
                stack.pop()
    return []


def build_constraint_dag(
    ordering: Ordering,
    classes: AlignmentClasses,
    gs: GraphSequence,
    wiggle_weight: float = 0.0,
    min_separation: int = 1,
) -> ConstraintDag:
    """Ordering arcs between consecutive classes in each window, weighted by the edges spanning them.

    An edge ``(u, v)`` of window ``i`` adds ``w(u, v)`` to every ordering arc
    between ``rank(i, u)`` and ``rank(i, v)``.  With ``wiggle_weight > 0``
    each unaligned pair of adjacent appearances also gets an auxiliary
    vertex charging ``wiggle_weight * |height difference|``.
    """
    arcs: dict[tuple[int, int], list] = {}
    for win in gs:
        i = win.index
        order = ordering.orders[i]
        if not order:
            continue
        ranks = ordering.ranks(i)
        span = [0.0] * len(order)
        for e in win.edges:
            a, b = sorted((ranks[e.u], ranks[e.v]))
            span[a] += e.w
            span[b] -= e.w
        acc = 0.0
        cls = [classes(i, v) for v in order]
        for j in range(len(order) - 1):
            acc += span[j]
            key = (cls[j], cls[j + 1])
            rec = arcs.get(key)
            if rec is None:
                arcs[key] = [acc, min_separation]
            else:
                rec[0] += acc
                rec[1] = max(rec[1], min_separation)

    n = classes.n_classes
    succ: list[list[int]] = [[] for _ in range(n)]
    for t, h in arcs:
        succ[t].append(h)
    for s in succ:
        s.sort()
    cycle = _find_cycle(n, succ)
    if cycle:
        raise ConstraintCycleError(cycle)

    n_vertices = n
    if wiggle_weight > 0:
        for i, j in gs.adjacent_pairs():
            nxt = ordering.ranks(j)
            for v in ordering.orders[i]:
                if v not in nxt:
                    continue
                a, b = classes(i, v), classes(j, v)
                if a == b:
                    continue
                x = n_vertices
                n_vertices += 1
                arcs[(x, a)] = [wiggle_weight, 0]
                arcs[(x, b)] = [wiggle_weight, 0]

    return ConstraintDag(
        n_vertices,
        tuple((t, h, w, m) for (t, h), (w, m) in sorted(arcs.items())),
        n,
    )


def network_simplex_levels(dag: ConstraintDag) -> LevelAssignment:
    """Optimal integer levels for the constraint DAG, minimum level 0."""
    tails = [a[0] for a in dag.arcs]
    heads = [a[1] for a in dag.arcs]
    weights = [a[2] for a in dag.arcs]
    minlens = [a[3] for a in dag.arcs]
    rank, pivots = solve_ranks(dag.n_vertices, tails, heads, weights, minlens)
    level = rank[: dag.n_classes]
    if level:
        # isolated components are each normalised to 0 already; pin the global minimum too
        base = min(level)
        level = [r - base for r in level]
    cost = assignment_cost(rank, tails, heads, weights)
    return LevelAssignment(tuple(level), cost, pivots)


def unit_levels(ordering: Ordering, classes: AlignmentClasses) -> LevelAssignment:
    """Baseline: every appearance at its ordering index (needs singleton classes)."""
    level = [0] * classes.n_classes
    for i, order in enumerate(ordering.orders):
        for j, v in enumerate(order):
            level[classes(i, v)] = j
    return LevelAssignment(tuple(level), float("nan"))


# ---------------------------------------------------------------------------
# Layout
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WindowBox:
    label: str
    x0: float
    x1: float


@dataclass(frozen=True)
class NodePos:
    id: str
    window: int
    y: int


@dataclass(frozen=True)
class EdgePos:
    u: str
    v: str
    window: int
    x: float
    w: float = 1.0


@dataclass(frozen=True)
class Layout:
    """Resolved positions; a node spans its window horizontally at height ``y``."""

    windows: tuple[WindowBox, ...] = ()
    nodes: tuple[NodePos, ...] = ()
    edges: tuple[EdgePos, ...] = ()

    @cached_property
    def _y(self) -> dict[tuple[int, str], int]:
        return {(p.window, p.id): p.y for p in self.nodes}

    def y(self, i: int, v: str) -> int:
        return self._y[(i, v)]

    def has(self, i: int, v: str) -> bool:
        return (i, v) in self._y

    def position(self, i: int, v: str) -> tuple[float, int]:
        return self.windows[i].x0, self._y[(i, v)]

    def window_nodes(self, i: int) -> list[NodePos]:
        return [p for p in self.nodes if p.window == i]

    def appearances(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for p in self.nodes:
            out.setdefault(p.id, []).append(p.window)
        for ws in out.values():
            ws.sort()
        return out

    @property
    def max_level(self) -> int:
        return max((p.y for p in self.nodes), default=0)

    def to_dict(self, colors: dict[str, str] | None = None) -> dict:
        nodes = []
        for p in self.nodes:
            rec = {"id": p.id, "window": p.window, "y": p.y}
            if colors is not None and p.id in colors:
                rec["color"] = colors[p.id]
            nodes.append(rec)
        return {
            "windows": [{"label": b.label, "x0": b.x0, "x1": b.x1} for b in self.windows],
            "nodes": nodes,
            "edges": [{"u": e.u, "v": e.v, "window": e.window, "x": e.x, "w": e.w} for e in self.edges],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Layout":
        return cls(
            tuple(WindowBox(str(b["label"]), float(b["x0"]), float(b["x1"])) for b in doc.get("windows", [])),
            tuple(NodePos(str(p["id"]), int(p["window"]), int(p["y"])) for p in doc.get("nodes", [])),
            tuple(
                EdgePos(str(e["u"]), str(e["v"]), int(e["window"]), float(e["x"]), float(e.get("w", 1.0)))
                for e in doc.get("edges", [])
            ),
        )

    @classmethod
    def from_json(cls, text: str | bytes) -> "Layout":
        return cls.from_dict(json.loads(text))


def assign_positions(
    gs: GraphSequence,
    ordering: Ordering,
    classes: AlignmentClasses,
    levels: LevelAssignment,
    window_width: float = DEFAULT_WINDOW_WIDTH,
    x_policy: str = "auto",
) -> Layout:
    """Map levels to ``y`` and windows to ``[i*W, (i+1)*W)``; place each edge arc.

    ``x_policy`` is ``"midpoint"``, ``"event-time"`` (interpolate the edge
    time within the window's span) or ``"auto"`` (event time whenever the
    edge carries one and spans are known).
    """
    if x_policy not in ("auto", "midpoint", "event-time"):
        raise ValueError(f"unknown x_policy {x_policy!r}")
    W = float(window_width)
    boxes = tuple(WindowBox(win.label, i * W, (i + 1) * W) for i, win in enumerate(gs))
    nodes = tuple(
        NodePos(v, i, int(levels[classes(i, v)]))
        for i, order in enumerate(ordering.orders)
        for v in order
    )
    edges = []
    for win in gs:
        box = boxes[win.index]
        span = gs.spans[win.index] if gs.spans is not None else None
        for e in win.edges:
            x = (box.x0 + box.x1) / 2
            if x_policy != "midpoint" and e.t is not None and span is not None and span[1] > span[0]:
                frac = min(max((e.t - span[0]) / (span[1] - span[0]), 0.0), 1.0)
                x = box.x0 + W * frac
            edges.append(EdgePos(e.u, e.v, win.index, x, e.w))
    return Layout(boxes, nodes, tuple(edges))
