"""Straightening storylines between adjacent windows.

Nodes shared by two adjacent windows whose relative order flips cannot both
be held at one height.  Those conflicts form a constraint graph; a maximum
weight independent set of it is a feasible set of nodes to align.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .ingest import GraphSequence
from .ordering import Ordering

__all__ = [
    "ConstraintGraph",
    "AlignmentClasses",
    "UnionFind",
    "find_crossings",
    "greedy_mwis",
    "greedy_bound",
    "build_alignment_classes",
    "rank_increase_weights",
    "align",
    "lcs_alignment",
]

# above this many shared nodes crossings are enumerated by merge sort
ALL_PAIRS_LIMIT = 64


@dataclass
class ConstraintGraph:
    pair: tuple[int, int]
    vertices: list[str]
    edges: set[frozenset] = field(default_factory=set)
    weights: dict[str, float] = field(default_factory=dict)

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            a, b = tuple(e)
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def is_independent(self, chosen: Iterable[str]) -> bool:
        chosen = set(chosen)
        return not any(e <= chosen for e in self.edges)

    def weight_of(self, chosen: Iterable[str]) -> float:
        return sum(self.weights.get(v, 1.0) for v in chosen)


def _inversions_all_pairs(seq: list[str], later: Mapping[str, int]) -> set[frozenset]:
    out = set()
    for a in range(len(seq)):
        ra = later[seq[a]]
        for b in range(a + 1, len(seq)):
            if later[seq[b]] < ra:
                out.add(frozenset((seq[a], seq[b])))
    return out


def _inversions_merge(seq: list[str], later: Mapping[str, int]) -> set[frozenset]:
    """Merge sort on the later-window ranks, reporting every inverted pair."""
    out: set[frozenset] = set()
    items = [(later[v], v) for v in seq]
    width = 1
    n = len(items)
    while width < n:
        merged = []
        for lo in range(0, n, 2 * width):
            left = items[lo:lo + width]
            right = items[lo + width:lo + 2 * width]
            a = b = 0
            while a < len(left) and b < len(right):
                if right[b][0] < left[a][0]:
                    # right[b] jumps ahead of every remaining left item
                    rv = right[b][1]
                    for _, lv in left[a:]:
                        out.add(frozenset((lv, rv)))
                    merged.append(right[b])
                    b += 1
                else:
                    merged.append(left[a])
                    a += 1
            merged.extend(left[a:])
            merged.extend(right[b:])
        items = merged
        width *= 2
    return out


def find_crossings(
    ordering: Ordering,
    pair: tuple[int, int],
    weight: Callable[[str], float] | Mapping[str, float] | None = None,
) -> ConstraintGraph:
    """Constraint graph of a window pair: shared nodes, edges between inverted pairs."""
    i, j = pair
    rj = ordering.ranks(j)
    shared = [v for v in ordering.orders[i] if v in rj]
    if len(shared) > ALL_PAIRS_LIMIT:
        edges = _inversions_merge(shared, rj)
    else:
        edges = _inversions_all_pairs(shared, rj)
    if weight is None:
        weights = dict.fromkeys(shared, 1.0)
    elif callable(weight):
        weights = {v: float(weight(v)) for v in shared}
    else:
        weights = {v: float(weight.get(v, 1.0)) for v in shared}
    return ConstraintGraph(pair, shared, edges, weights)


def greedy_bound(cg: ConstraintGraph) -> float:
    """Guaranteed weight of the w/(deg+1) greedy: sum of w(v)/(deg(v)+1)."""
    adj = cg.adjacency()
    return sum(cg.weights.get(v, 1.0) / (len(adj[v]) + 1) for v in cg.vertices)


def greedy_mwis(cg: ConstraintGraph) -> set[str]:
    """Greedy weighted independent set (GWMIN rule).

    Repeatedly takes the vertex maximising ``w / (deg + 1)`` in the residual
    graph (ties: larger weight, then smaller node id) and deletes it with its
    neighbours.  A lazy heap keeps this at O((V + E) log V).
    """
    adj = cg.adjacency()
    w = {v: cg.weights.get(v, 1.0) for v in cg.vertices}
    deg = {v: len(adj[v]) for v in cg.vertices}
    alive = set(cg.vertices)
    heap = [(-w[v] / (deg[v] + 1), -w[v], v) for v in cg.vertices]
    heapq.heapify(heap)
    chosen: set[str] = set()
    while heap:
        key, negw, v = heapq.heappop(heap)
        if v not in alive or key != -w[v] / (deg[v] + 1):
            continue
        chosen.add(v)
        removed = [v] + [u for u in adj[v] if u in alive]
        alive.difference_update(removed)
        touched = set()
        for r in removed:
            for x in adj[r]:
                if x in alive:
                    deg[x] -= 1
                    touched.add(x)
        for x in touched:
            heapq.heappush(heap, (-w[x] / (deg[x] + 1), -w[x], x))
    return chosen


class UnionFind:
    def __init__(self, items: Iterable = ()):
        self.parent = {x: x for x in items}
        self.size = dict.fromkeys(self.parent, 1)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True)
class AlignmentClasses:
    """Partition of (window, node) appearances; ``class_of[(i, v)]`` is a dense id.

    Class ids are numbered by first appearance in window order, then
    in-window order.
    """

    class_of: dict[tuple[int, str], int]
    n_classes: int

    def __call__(self, i: int, v: str) -> int:
        return self.class_of[(i, v)]

    def members(self) -> list[list[tuple[int, str]]]:
        out: list[list[tuple[int, str]]] = [[] for _ in range(self.n_classes)]
        for key, c in self.class_of.items():
            out[c].append(key)
        return out


def build_alignment_classes(
    ordering: Ordering,
    selections: Mapping[tuple[int, int], Iterable[str]],
) -> AlignmentClasses:
    """Union appearances ``(i, v)`` and ``(j, v)`` for every ``v`` selected in pair ``(i, j)``."""
    keys = [(i, v) for i, order in enumerate(ordering.orders) for v in order]
    uf = UnionFind(keys)
    for (i, j), chosen in selections.items():
        for v in chosen:
            uf.union((i, v), (j, v))
    ids: dict = {}
    class_of = {}
    for key in keys:
        class_of[key] = ids.setdefault(uf.find(key), len(ids))
    return AlignmentClasses(class_of, len(ids))


def rank_increase_weights(ordering: Ordering, pairs: Sequence[tuple[int, int]] | None = None) -> dict:
    """Per-pair weights: 0 for a node whose rank index grows (drops in the poll), else 1."""
    if pairs is None:
        pairs = [(i, i + 1) for i in range(len(ordering) - 1)]
    out = {}
    for i, j in pairs:
        ri, rj = ordering.ranks(i), ordering.ranks(j)
        out[(i, j)] = {v: (0.0 if rj[v] > ri[v] else 1.0) for v in ri if v in rj}
    return out


def _classes_acyclic(ordering: Ordering, uf: UnionFind) -> bool:
    succ: dict = {}
    indeg: dict = {}
    for i, order in enumerate(ordering.orders):
        for a, b in zip(order, order[1:]):
            ca, cb = uf.find((i, a)), uf.find((i, b))
            if ca == cb:
                return False
            succ.setdefault(ca, set())
            if cb not in succ[ca]:
                succ[ca].add(cb)
                indeg[cb] = indeg.get(cb, 0) + 1
            indeg.setdefault(ca, indeg.get(ca, 0))
    stack = [c for c, d in indeg.items() if d == 0]
    seen = 0
    while stack:
        c = stack.pop()
        seen += 1
        for d in succ.get(c, ()):
            indeg[d] -= 1
            if indeg[d] == 0:
                stack.append(d)
    return seen == len(indeg)


def align(
    gs: GraphSequence,
    ordering: Ordering,
    weights: Mapping[tuple[int, int], Mapping[str, float]] | Mapping[str, float] | None = None,
) -> tuple[dict[tuple[int, int], set[str]], AlignmentClasses, list[ConstraintGraph]]:
    """Run crossing detection, greedy MWIS and class construction for all pairs.

    ``weights`` is either per-pair (keyed by window pair) or a single
    node-id mapping used for every pair.  For cyclic sequences the
    wraparound pair comes last; a wraparound merge that would make the
    class constraints cyclic is skipped.
    """
    pairs = gs.adjacent_pairs()
    graphs = []
    selections: dict[tuple[int, int], set[str]] = {}
    for pair in pairs:
        if weights is None:
            wmap = None
        elif pair in weights or any(isinstance(k, tuple) for k in weights):
            wmap = weights.get(pair, {})
        else:
            wmap = weights
        cg = find_crossings(ordering, pair, wmap)
        graphs.append(cg)
        selections[pair] = greedy_mwis(cg)

    n = len(gs)
    wrap = (n - 1, 0) if gs.cyclic and n > 2 else None
    if wrap is not None and selections.get(wrap):
        keys = [(i, v) for i, order in enumerate(ordering.orders) for v in order]
        uf = UnionFind(keys)
        for pair, chosen in selections.items():
            if pair != wrap:
                for v in chosen:
                    uf.union((pair[0], v), (pair[1], v))
        kept = set()
        for v in ordering.orders[wrap[0]]:
            if v not in selections[wrap]:
                continue
            trial = UnionFind(keys)
            trial.parent, trial.size = dict(uf.parent), dict(uf.size)
            trial.union((wrap[0], v), (wrap[1], v))
            if _classes_acyclic(ordering, trial):
                uf = trial
                kept.add(v)
        selections[wrap] = kept
    return selections, build_alignment_classes(ordering, selections), graphs


def lcs_alignment(order_a: Sequence[str], order_b: Sequence[str]) -> list[str]:
    """Baseline alignment: the longest run of nodes appearing contiguously in both orders.

    Only nodes that sit next to each other in both windows, with no
    unshared node in between, can be straightened together by this baseline.
    Ties go to the earliest run in ``order_a``.
    """
    best_len, best_end = 0, 0
    prev = [0] * (len(order_b) + 1)
    for a in range(1, len(order_a) + 1):
        cur = [0] * (len(order_b) + 1)
        for b in range(1, len(order_b) + 1):
            if order_a[a - 1] == order_b[b - 1]:
                cur[b] = prev[b - 1] + 1
                if cur[b] > best_len:
                    best_len, best_end = cur[b], a
        prev = cur
    return list(order_a[best_end - best_len:best_end])
