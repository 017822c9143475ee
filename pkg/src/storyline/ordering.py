"""Per-window vertical ordering by seriation of the aggregate graph."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.cluster.hierarchy import linkage
from scipy.linalg import eigh
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import lobpcg

from .exceptions import SeriationError, ValidationError
from .ingest import AggregateGraph, GraphSequence

__all__ = [
    "Ordering",
    "Dendrogram",
    "laplacian",
    "fiedler_vector",
    "spectral_order",
    "dendrogram_order",
    "optimal_leaf_order",
    "apply_given_order",
    "identity_order",
]

# components up to this size use a dense symmetric eigensolver
DENSE_LIMIT = 400
EIG_TOL = 1e-9
EIG_MAXITER = 10_000


@dataclass(frozen=True)
class Ordering:
    """One permutation of ``V_i`` per window, top to bottom."""

    orders: tuple[tuple[str, ...], ...]

    @classmethod
    def from_lists(cls, lists: Iterable[Sequence[str]]) -> "Ordering":
        return cls(tuple(tuple(x) for x in lists))

    @cached_property
    def _ranks(self) -> list[dict[str, int]]:
        return [{v: j for j, v in enumerate(order)} for order in self.orders]

    def __len__(self) -> int:
        return len(self.orders)

    def s(self, i: int, j: int) -> str:
        return self.orders[i][j]

    def rank(self, i: int, v: str) -> int:
        return self._ranks[i][v]

    def ranks(self, i: int) -> dict[str, int]:
        return self._ranks[i]

    def to_json(self) -> dict:
        return {"orders": [list(o) for o in self.orders]}


def identity_order(gs: GraphSequence) -> Ordering:
    """Each window's nodes in their stored (input) order."""
    return Ordering(tuple(win.nodes for win in gs))


def apply_given_order(gs: GraphSequence, ranks: Sequence[Sequence[str]]) -> Ordering:
    """Wrap user-supplied per-window orders after checking each is a permutation of ``V_i``."""
    if len(ranks) != len(gs):
        raise ValidationError(f"given order has {len(ranks)} windows, sequence has {len(gs)}")
    for win, order in zip(gs, ranks):
        order = [str(v) for v in order]
        want, got = set(win.nodes), set(order)
        if want != got or len(order) != len(got):
            missing = sorted(want - got)
            extra = sorted(got - want)
            dup = sorted({v for v in order if order.count(v) > 1})
            parts = []
            if missing:
                parts.append(f"missing {missing}")
            if extra:
                parts.append(f"extra {extra}")
            if dup:
                parts.append(f"duplicated {dup}")
            raise ValidationError(f"window {win.index}: order is not a permutation of its nodes ({'; '.join(parts)})")
    return Ordering.from_lists([[str(v) for v in o] for o in ranks])


# ---------------------------------------------------------------------------
# Spectral seriation
# ---------------------------------------------------------------------------


def laplacian(agg: AggregateGraph) -> tuple[sp.csr_matrix, dict]:
    """Weighted Laplacian ``D - W`` over the aggregate nodes, plus the node index."""
    index = {node: k for k, node in enumerate(agg.nodes)}
    n = len(index)
    edges = agg.edges
    rows = np.fromiter((index[a] for a, _, _ in edges), dtype=np.int64, count=len(edges))
    cols = np.fromiter((index[b] for _, b, _ in edges), dtype=np.int64, count=len(edges))
    w = np.fromiter((c for _, _, c in edges), dtype=float, count=len(edges))
    W = sp.coo_matrix((w, (rows, cols)), shape=(n, n)).tocsr()
    W = W + W.T
    deg = np.asarray(W.sum(axis=1)).ravel()
    return (sp.diags(deg) - W).tocsr(), index


def _start_vector(n: int) -> np.ndarray:
    x = np.linspace(-1.0, 1.0, n)
    x -= x.mean()
    return x / np.linalg.norm(x)


def fiedler_vector(L, dense_limit: int = DENSE_LIMIT) -> tuple[float, np.ndarray]:
    """Smallest nonzero eigenpair of a connected graph's Laplacian (unit norm).

    Small problems use a dense symmetric solver; larger ones run LOBPCG from a
    fixed start vector deflated against the constant vector, preconditioned
    with smoothed-aggregation AMG.
    """
    n = L.shape[0]
    if n < 2:
        return 0.0, np.zeros(n)
    # LOBPCG switches to a dense solve that rejects constraints on tiny inputs
    if n <= max(dense_limit, 7):
        dense = L.toarray() if sp.issparse(L) else np.asarray(L, dtype=float)
        vals, vecs = eigh(dense, subset_by_index=[1, 1])
        return float(vals[0]), vecs[:, 0]

    import pyamg

    L = sp.csr_matrix(L, dtype=float)
    ones = np.full((n, 1), 1.0 / np.sqrt(n))
    # a tiny diagonal shift makes the singular Laplacian usable for AMG setup
    ml = pyamg.smoothed_aggregation_solver(L + sp.identity(n, format="csr") * 1e-8)
    X = _start_vector(n)[:, None]
    scale = max(1.0, float(abs(L).sum(axis=1).max()))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals, vecs, hist = lobpcg(
            L, X, M=ml.aspreconditioner(), Y=ones, largest=False,
            tol=EIG_TOL * scale, maxiter=EIG_MAXITER, retResidualNormsHistory=True,
        )
    x = vecs[:, 0]
    x /= np.linalg.norm(x)
    lam = float(x @ (L @ x))
    residual = float(np.linalg.norm(L @ x - lam * x))
    if not residual <= EIG_TOL * scale * 10:
        raise SeriationError("Fiedler vector did not converge", len(hist), residual)
    return lam, x


def _fix_sign(x: np.ndarray, keys: list) -> np.ndarray:
    # the lexicographically smallest node id must not sit on the positive side
    for k in sorted(range(len(keys)), key=keys.__getitem__):
        if abs(x[k]) > 1e-12:
            return -x if x[k] > 0 else x
    return x


def spectral_order(agg: AggregateGraph, dense_limit: int = DENSE_LIMIT) -> Ordering:
    """Sort every window's nodes by the Fiedler vector of the aggregate Laplacian.

    Connected components are seriated independently and stacked largest
    first (ties by smallest node id); within a component equal coordinates
    fall back to node id.
    """
    if not agg.nodes:
        raise ValidationError("aggregate graph is empty")
    L, index = laplacian(agg)
    n_comp, labels = connected_components(L, directed=False)
    nodes = agg.nodes
    value = np.zeros(len(nodes))

    members: list[list[int]] = [[] for _ in range(n_comp)]
    for k, c in enumerate(labels):
        members[c].append(k)
    for idx in members:
        if len(idx) < 2:
            continue
        sub = L[idx][:, idx]
        _, x = fiedler_vector(sub, dense_limit)
        keys = [(nodes[k][1], nodes[k][0]) for k in idx]
        value[idx] = _fix_sign(x, keys)

    comp_key = sorted(
        range(n_comp),
        key=lambda c: (-len(members[c]), min((nodes[k][1], nodes[k][0]) for k in members[c])),
    )
    comp_rank = np.empty(n_comp, dtype=int)
    comp_rank[comp_key] = np.arange(n_comp)

    value = np.round(value, 12)
    per_window: list[list[tuple]] = [[] for _ in range(agg.n_windows)]
    for k, (i, v) in enumerate(nodes):
        per_window[i].append((comp_rank[labels[k]], value[k], v))
    return Ordering(tuple(tuple(v for *_, v in sorted(items)) for items in per_window))


# ---------------------------------------------------------------------------
# Dendrogram seriation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree; a leaf carries ``leaf`` and no children."""

    leaf: str | None = None
    children: tuple["Dendrogram", "Dendrogram"] | None = None
    height: float = 0.0

    def __post_init__(self):
        if (self.leaf is None) == (self.children is None):
            raise ValidationError("a dendrogram node is either a leaf or has exactly two children")

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    def leaves(self) -> list[str]:
        out, stack = [], [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.leaf)
            else:
                stack.extend(reversed(node.children))
        return out

    def internal_nodes(self) -> list["Dendrogram"]:
        out, stack = [], [self]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                out.append(node)
                stack.extend(node.children)
        return out

    @classmethod
    def from_nested(cls, obj) -> "Dendrogram":
        """Build from nested pairs, e.g. ``(("a", "b"), ("c", "d"))``."""
        if isinstance(obj, Dendrogram):
            return obj
        if isinstance(obj, (list, tuple)):
            if len(obj) == 1:
                return cls.from_nested(obj[0])
            if len(obj) != 2:
                raise ValidationError(f"dendrogram nodes must be binary, got {len(obj)} children")
            left, right = cls.from_nested(obj[0]), cls.from_nested(obj[1])
            return cls(children=(left, right), height=1.0 + max(left.height, right.height))
        return cls(leaf=str(obj))

    @classmethod
    def from_linkage(cls, Z: np.ndarray, labels: Sequence[str]) -> "Dendrogram":
        nodes = [cls(leaf=str(x)) for x in labels]
        for a, b, h, _ in Z:
            nodes.append(cls(children=(nodes[int(a)], nodes[int(b)]), height=float(h)))
        return nodes[-1]

    def to_nested(self):
        if self.is_leaf:
            return self.leaf
        return [c.to_nested() for c in self.children]


def similarity_matrix(agg: AggregateGraph, labels: Sequence[str]) -> np.ndarray:
    """Summed intra-window edge weight between node ids."""
    pos = {v: k for k, v in enumerate(labels)}
    S = np.zeros((len(labels), len(labels)))
    for (_, u), (_, v), w in agg.intra_edges:
        S[pos[u], pos[v]] += w
        S[pos[v], pos[u]] += w
    return S


def _to_dissimilarity(S: np.ndarray) -> np.ndarray:
    D = S.max() - S if S.size else S.copy()
    np.fill_diagonal(D, 0.0)
    return D


def average_linkage_tree(agg: AggregateGraph, labels: Sequence[str]) -> Dendrogram:
    """Average-linkage agglomerative tree on aggregate-edge similarity."""
    if len(labels) == 1:
        return Dendrogram(leaf=labels[0])
    D = _to_dissimilarity(similarity_matrix(agg, labels))
    # average distance of (c - s) equals c minus average similarity
    Z = linkage(D[np.triu_indices(len(labels), 1)], method="average")
    return Dendrogram.from_linkage(Z, labels)


def optimal_leaf_order(tree: Dendrogram, D: np.ndarray, labels: Sequence[str]) -> list[str]:
    """Leaf order of ``tree`` minimising the summed dissimilarity of neighbours.

    Dynamic program over pairs of outermost leaves: ``M[i, j]`` is the best
    cost of a subtree ordering starting at leaf ``i`` and ending at ``j``,
    filled at the lowest common ancestor of ``i`` and ``j``.  O(n^3).
    """
    pos = {v: k for k, v in enumerate(labels)}
    n = len(labels)
    if n == 0:
        return []
    M = np.full((n, n), np.inf)
    arg_k = np.full((n, n), -1, dtype=np.int64)
    arg_m = np.full((n, n), -1, dtype=np.int64)
    leaves_of: dict[int, list[list[int]]] = {}

    # post-order walk; each subtree records its leaves split by child
    stack = [(tree, False)]
    while stack:
        node, done = stack.pop()
        if node.is_leaf:
            k = pos[node.leaf]
            M[k, k] = 0.0
            leaves_of[id(node)] = [[k]]
            continue
        if not done:
            stack.append((node, True))
            stack.extend((c, False) for c in reversed(node.children))
            continue
        a_node, b_node = node.children
        A, B = leaves_of.pop(id(a_node)), leaves_of.pop(id(b_node))
        a_all = [k for part in A for k in part]
        b_all = [k for part in B for k in part]
        for I, K in _sides(A):
            for J, Mset in _sides(B):
                # T[i, m] = min_k M[i, k] + D[k, m]
                t3 = M[np.ix_(I, K)][:, :, None] + D[np.ix_(K, Mset)][None, :, :]
                kbest = t3.argmin(axis=1)
                T = np.take_along_axis(t3, kbest[:, None, :], axis=1)[:, 0, :]
                # M[i, j] = min_m T[i, m] + M[m, j]
                u3 = T[:, :, None] + M[np.ix_(Mset, J)][None, :, :]
                mbest = u3.argmin(axis=1)
                best = np.take_along_axis(u3, mbest[:, None, :], axis=1)[:, 0, :]
                Ia, Ja = np.asarray(I), np.asarray(J)
                Marr, Karr = np.asarray(Mset), np.asarray(K)
                m_idx = Marr[mbest]
                k_idx = Karr[kbest[np.arange(len(I))[:, None], mbest]]
                M[np.ix_(Ia, Ja)] = best
                M[np.ix_(Ja, Ia)] = best.T
                arg_k[np.ix_(Ia, Ja)] = k_idx
                arg_m[np.ix_(Ia, Ja)] = m_idx
                # reversed orientation: order j..i mirrors i..j
                arg_k[np.ix_(Ja, Ia)] = m_idx.T
                arg_m[np.ix_(Ja, Ia)] = k_idx.T
        leaves_of[id(node)] = [a_all, b_all]

    if tree.is_leaf:
        return [tree.leaf]
    A, B = [pos[x] for x in tree.children[0].leaves()], [pos[x] for x in tree.children[1].leaves()]
    sub = M[np.ix_(A, B)]
    flat = int(np.argmin(sub))
    i, j = A[flat // len(B)], B[flat % len(B)]

    order: list[int] = []
    stack2 = [(i, j)]
    while stack2:
        a, b = stack2.pop()
        if a == b:
            order.append(a)
            continue
        k, m = int(arg_k[a, b]), int(arg_m[a, b])
        stack2.append((m, b))
        stack2.append((a, k))
    names = [labels[k] for k in order]
    rev = names[::-1]
    return rev if rev < names else names


def _sides(parts: list[list[int]]):
    """(outer leaves, opposite-end leaves) choices for one child subtree."""
    if len(parts) == 1:
        return [(parts[0], parts[0])]
    first, second = parts
    return [(first, second), (second, first)]


def leaf_order_cost(order: Sequence[str], D: np.ndarray, labels: Sequence[str]) -> float:
    pos = {v: k for k, v in enumerate(labels)}
    return float(sum(D[pos[a], pos[b]] for a, b in zip(order, order[1:])))


def dendrogram_order(agg: AggregateGraph, tree: Dendrogram | None = None) -> tuple[Ordering, Dendrogram]:
    """Order windows by the optimal leaf order of a (given or clustered) dendrogram.

    Returns the ordering and the tree used.
    """
    labels = sorted({v for _, v in agg.nodes})
    if not labels:
        raise ValidationError("aggregate graph is empty")
    if tree is None:
        tree = average_linkage_tree(agg, labels)
    else:
        tree = Dendrogram.from_nested(tree)
        leaves = tree.leaves()
        missing = sorted(set(labels) - set(leaves))
        if missing:
            raise ValidationError(f"dendrogram is missing nodes {missing}")
        if len(set(leaves)) != len(leaves):
            raise ValidationError("dendrogram lists a leaf more than once")
        labels = sorted(leaves)
    D = _to_dissimilarity(similarity_matrix(agg, labels))
    leaf_order = optimal_leaf_order(tree, D, labels)
    pos = {v: k for k, v in enumerate(leaf_order)}
    per_window: list[list[str]] = [[] for _ in range(agg.n_windows)]
    for i, v in agg.nodes:
        per_window[i].append(v)
    return Ordering(tuple(tuple(sorted(vs, key=pos.__getitem__)) for vs in per_window)), tree
