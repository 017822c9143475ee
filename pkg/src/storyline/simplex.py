"""Network simplex for optimal integer rank assignment.

Minimises ``sum(w_e * (rank[head] - rank[tail]))`` subject to
``rank[head] - rank[tail] >= minlen_e`` on a DAG.  Follows the classic
layered-drawing formulation: longest-path start, tight spanning tree,
cut values maintained incrementally with postorder (low, lim) numbering.
"""

from __future__ import annotations

import heapq
from typing import Sequence

__all__ = ["solve_ranks", "assignment_cost"]


def assignment_cost(rank: Sequence[int], tails, heads, weights) -> float:
    return sum(w * (rank[h] - rank[t]) for t, h, w in zip(tails, heads, weights))


def _components(n: int, tails, heads) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, h in zip(tails, heads):
        a, b = find(t), find(h)
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def solve_ranks(n: int, tails, heads, weights, minlens, max_iter: int | None = None) -> tuple[list[int], int]:
    """Optimal ranks (min rank 0 per weakly connected component) and pivot count."""
    tails, heads = list(tails), list(heads)
    weights, minlens = list(weights), list(minlens)
    rank = [0] * n
    pivots = 0
    arcs_of = [[] for _ in range(n)]
    for e, t in enumerate(tails):
        arcs_of[t].append(e)
    for comp in _components(n, tails, heads):
        if len(comp) == 1:
            continue
        local = {v: k for k, v in enumerate(comp)}
        ids = sorted({e for v in comp for e in arcs_of[v]})
        solver = _Simplex(
            len(comp),
            [local[tails[e]] for e in ids],
            [local[heads[e]] for e in ids],
            [weights[e] for e in ids],
            [minlens[e] for e in ids],
        )
        pivots += solver.run(max_iter)
        for v, r in zip(comp, solver.rank):
            rank[v] = r
    return rank, pivots


class _Simplex:
    def __init__(self, n, tails, heads, weights, minlens):
        self.n = n
        self.tail, self.head = tails, heads
        self.weight, self.minlen = weights, minlens
        m = len(tails)
        self.out = [[] for _ in range(n)]
        self.inc = [[] for _ in range(n)]
        for e in range(m):
            self.out[tails[e]].append(e)
            self.inc[heads[e]].append(e)
        self.rank = [0] * n
        self.in_tree = [False] * m
        self.tree = [dict() for _ in range(n)]  # ordered set of incident tree arcs
        self.cut = [0] * m
        self.par = [-1] * n
        self.low = [0] * n
        self.lim = [0] * n
        self.negative: list[int] = []

    def slack(self, e: int) -> int:
        return self.rank[self.head[e]] - self.rank[self.tail[e]] - self.minlen[e]

    # -- initial solution -------------------------------------------------

    def init_rank(self):
        indeg = [len(a) for a in self.inc]
        stack = [v for v in range(self.n) if indeg[v] == 0]
        stack.reverse()
        seen = 0
        rank = self.rank
        while stack:
            v = stack.pop()
            seen += 1
            for e in self.out[v]:
                h = self.head[e]
                r = rank[v] + self.minlen[e]
                if r > rank[h]:
                    rank[h] = r
                indeg[h] -= 1
                if indeg[h] == 0:
                    stack.append(h)
        if seen != self.n:
            raise ValueError("constraint graph has a cycle")

    def add_tree_arc(self, e: int):
        self.in_tree[e] = True
        self.tree[self.tail[e]][e] = None
        self.tree[self.head[e]][e] = None

    def remove_tree_arc(self, e: int):
        self.in_tree[e] = False
        del self.tree[self.tail[e]][e]
        del self.tree[self.head[e]][e]

    def feasible_tree(self):
        """Grow tight subtrees, then merge smallest-first along min-slack arcs."""
        n = self.n
        owner = [-1] * n
        members: list[list[int]] = []
        for root in range(n):
            if owner[root] >= 0:
                continue
            tid = len(members)
            owner[root] = tid
            group = [root]
            stack = [root]
            while stack:
                v = stack.pop()
                for e in self.out[v] + self.inc[v]:
                    x = self.head[e] if self.tail[e] == v else self.tail[e]
                    if owner[x] < 0 and self.slack(e) == 0:
                        owner[x] = tid
                        group.append(x)
                        stack.append(x)
                        self.add_tree_arc(e)
            members.append(group)

        # union-find over subtree ids, so merged trees share a representative
        rep = list(range(len(members)))

        def find(t):
            while rep[t] != t:
                rep[t] = rep[rep[t]]
                t = rep[t]
            return t

        version = [0] * len(members)
        heap = [(len(g), t, 0) for t, g in enumerate(members)]
        heapq.heapify(heap)
        alive = len(members)
        while alive > 1:
            size, t, ver = heapq.heappop(heap)
            if find(t) != t or ver != version[t]:
                continue
            best, best_slack = -1, None
            for v in members[t]:
                for e in self.out[v] + self.inc[v]:
                    if find(owner[self.tail[e]]) == find(owner[self.head[e]]):
                        continue
                    s = self.slack(e)
                    if best_slack is None or s < best_slack or (s == best_slack and e < best):
                        best, best_slack = e, s
            if best < 0:
                raise ValueError("constraint graph is not connected")
            tt, hh = find(owner[self.tail[best]]), find(owner[self.head[best]])
            # pull this subtree toward the other one until the arc is tight
            if tt == t:
                delta, other = best_slack, hh
            else:
                delta, other = -best_slack, tt
            if delta:
                for v in members[t]:
                    self.rank[v] += delta
            self.add_tree_arc(best)
            rep[t] = other
            members[other].extend(members[t])
            members[t] = []
            version[other] += 1
            heapq.heappush(heap, (len(members[other]), other, version[other]))
            alive -= 1

    # -- cut values ---------------------------------------------------------

    def dfs_range(self, root: int, par: int, low: int) -> int:
        """Number the subtree at ``root`` in postorder starting from ``low``.

        ``lim[v]`` is v's postorder number and ``low[v]`` the smallest number
        in its subtree, so ``x`` lies under ``v`` iff ``low[v] <= lim[x] <= lim[v]``.
        Returns the next free number.
        """
        tree, tail, head = self.tree, self.tail, self.head
        par_arc, low_a, lim_a = self.par, self.low, self.lim
        par_arc[root] = par
        low_a[root] = low
        counter = low
        stack = [(root, iter(tree[root]))]
        while stack:
            v, arcs = stack[-1]
            pv = par_arc[v]
            for e in arcs:
                if e != pv:
                    x = head[e] if tail[e] == v else tail[e]
                    par_arc[x] = e
                    low_a[x] = counter
                    stack.append((x, iter(tree[x])))
                    break
            else:
                lim_a[v] = counter
                counter += 1
                stack.pop()
        return counter

    def in_subtree(self, v: int, x: int) -> bool:
        return self.low[v] <= self.lim[x] <= self.lim[v]

    def x_cutval(self, f: int):
        if self.par[self.tail[f]] == f:
            v, direction = self.tail[f], 1
        else:
            v, direction = self.head[f], -1
        total = 0
        for e in self.out[v] + self.inc[v]:
            other = self.head[e] if self.tail[e] == v else self.tail[e]
            if not self.in_subtree(v, other):
                outside = True
                rv = self.weight[e]
            else:
                outside = False
                rv = (self.cut[e] if self.in_tree[e] else 0) - self.weight[e]
            if direction > 0:
                d = 1 if self.head[e] == v else -1
            else:
                d = 1 if self.tail[e] == v else -1
            if outside:
                d = -d
            total += rv if d > 0 else -rv
        self.cut[f] = total
        if total < 0:
            heapq.heappush(self.negative, f)

    def centroid(self) -> int:
        half = self.n / 2
        for v in range(self.n):
            below = self.lim[v] - self.low[v] + 1
            if self.n - below > half:
                continue
            if all(
                self.lim[x] - self.low[x] + 1 <= half
                for a in self.tree[v] if a != self.par[v]
                for x in [self.head[a] if self.tail[a] == v else self.tail[a]]
            ):
                return v
        return 0

    def init_cutvalues(self):
        self.dfs_range(0, -1, 1)
        # re-root at a centroid so fewer exchanges renumber the whole tree
        root = self.centroid()
        if root != 0:
            self.dfs_range(root, -1, 1)
        order = sorted(range(self.n), key=self.lim.__getitem__)
        for v in order:
            if self.par[v] >= 0:
                self.x_cutval(self.par[v])

    # -- pivoting -------------------------------------------------------------

    def leave_arc(self) -> int:
        neg = self.negative
        while neg:
            e = neg[0]
            if self.in_tree[e] and self.cut[e] < 0:
                return e
            heapq.heappop(neg)
        return -1

    def enter_arc(self, e: int) -> int:
        t, h = self.tail[e], self.head[e]
        if self.lim[t] < self.lim[h]:
            v, outsearch = t, False
        else:
            v, outsearch = h, True
        lo, hi = self.low[v], self.lim[v]
        best, best_slack = -1, None
        stack = [v]
        while stack:
            x = stack.pop()
            arcs = self.out[x] if outsearch else self.inc[x]
            for a in arcs:
                if self.in_tree[a]:
                    continue
                y = self.head[a] if outsearch else self.tail[a]
                if lo <= self.lim[y] <= hi:
                    continue
                s = self.slack(a)
                if best_slack is None or s < best_slack or (s == best_slack and a < best):
                    best, best_slack = a, s
            for a in self.tree[x]:
                if a == self.par[x]:
                    continue
                stack.append(self.head[a] if self.tail[a] == x else self.tail[a])
        return best

    def shift_subtree(self, v: int, delta: int):
        stack = [v]
        rank, tree, par = self.rank, self.tree, self.par
        while stack:
            x = stack.pop()
            rank[x] += delta
            for a in tree[x]:
                if a != par[x]:
                    stack.append(self.head[a] if self.tail[a] == x else self.tail[a])

    def tree_update(self, v: int, w: int, cutvalue: int, direction: bool) -> int:
        while not self.in_subtree(v, w):
            e = self.par[v]
            d = direction if v == self.tail[e] else not direction
            self.cut[e] += cutvalue if d else -cutvalue
            if self.cut[e] < 0:
                heapq.heappush(self.negative, e)
            v = self.tail[e] if self.lim[self.tail[e]] > self.lim[self.head[e]] else self.head[e]
        return v

    def update(self, e: int, f: int):
        delta = self.slack(f)
        if delta > 0:
            t, h = self.tail[e], self.head[e]
            if self.lim[t] < self.lim[h]:
                self.shift_subtree(t, -delta)
            else:
                self.shift_subtree(h, delta)
        cutvalue = self.cut[e]
        lca = self.tree_update(self.tail[f], self.head[f], cutvalue, True)
        if self.tree_update(self.head[f], self.tail[f], cutvalue, False) != lca:
            raise RuntimeError("network simplex: inconsistent tree update")
        self.cut[f] = -cutvalue
        self.cut[e] = 0
        self.remove_tree_arc(e)
        self.add_tree_arc(f)
        if self.cut[f] < 0:
            heapq.heappush(self.negative, f)
        self.dfs_range(lca, self.par[lca], self.low[lca])

    def run(self, max_iter: int | None = None) -> int:
        self.init_rank()
        self.feasible_tree()
        self.init_cutvalues()
        if max_iter is None:
            max_iter = max(10_000, 50 * self.n * max(1, len(self.tail)))
        pivots = 0
        while True:
            e = self.leave_arc()
            if e < 0:
                break
            f = self.enter_arc(e)
            if f < 0:
                raise RuntimeError("network simplex: unbounded (no entering arc)")
            self.update(e, f)
            pivots += 1
            if pivots > max_iter:
                raise RuntimeError(f"network simplex did not terminate after {pivots} pivots")
        base = min(self.rank)
        self.rank = [r - base for r in self.rank]
        return pivots
