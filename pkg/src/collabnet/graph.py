"""Compact immutable undirected simple graphs.

Nodes are dense integers ``0..n-1``; each graph keeps a table mapping those
indices back to the original string keys (artist ids). Adjacency is stored in
CSR form with every neighbor list sorted ascending, which the triangle and
BFS code in :mod:`collabnet.metrics` relies on.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import AnalysisError

log = logging.getLogger(__name__)

NodeSet = np.ndarray  # sorted, duplicate-free int64 array of NodeIds


@dataclass(frozen=True)
class CleaningSummary:
    rows_in: int
    loops_dropped: int
    duplicates_collapsed: int
    isolated_nodes: int

    def as_dict(self) -> dict:
        return {
            "rows_in": self.rows_in,
            "loops_dropped": self.loops_dropped,
            "duplicates_collapsed": self.duplicates_collapsed,
            "isolated_nodes": self.isolated_nodes,
        }


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph in CSR form.

    Attributes:
        indptr: offsets into ``indices``, length ``n + 1``.
        indices: concatenated sorted neighbor lists.
        keys: external key of each node.
        parent_ids: for induced subgraphs, the NodeId of each node in the
            root graph built from raw edges (chains of subgraphs collapse to
            the root); ``None`` for the root itself.
    """

    indptr: np.ndarray
    indices: np.ndarray
    keys: tuple
    parent_ids: np.ndarray | None = None

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.parent_ids):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.diff(self.indptr)
        d.setflags(write=False)
        return d

    @cached_property
    def key_index(self) -> dict:
        return {k: i for i, k in enumerate(self.keys)}

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def node_id(self, key: str) -> int:
        return self.key_index[key]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def edge_array(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(src, dst)`` arrays holding each edge once with ``src < dst``."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = src < self.indices
        return src[mask], self.indices[mask].astype(np.int64)

    def to_scipy(self) -> csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _from_pairs(src: np.ndarray, dst: np.ndarray, n: int, keys: tuple,
                parent_ids: np.ndarray | None = None) -> Graph:
    # src/dst must already be loop-free and duplicate-free, one entry per edge
    both_src = np.concatenate([src, dst])
    both_dst = np.concatenate([dst, src])
    order = np.lexsort((both_dst, both_src))
    indices = both_dst[order].astype(np.int64)
    counts = np.bincount(both_src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Graph(indptr, indices, keys, parent_ids)


def build_graph(edges: Iterable[Sequence[str]], keys: Iterable[str] | None = None
                ) -> tuple[Graph, CleaningSummary]:
    """Build a simple undirected graph from key pairs.

    Self-loops are dropped and repeated pairs (in either orientation) are
    collapsed. Keys listed in ``keys`` but absent from every edge become
    isolated nodes. Node ids follow first appearance: the key universe first,
    then any new keys in edge order.

    Returns:
        The graph and a :class:`CleaningSummary` of what was removed.
    """
    index: dict[str, int] = {}
    order: list[str] = []

    def intern(key) -> int:
        i = index.get(key)
        if i is None:
            i = index[key] = len(order)
            order.append(key)
        return i

    for key in keys or ():
        if not isinstance(key, str) or not key:
            raise ValueError(f"invalid node key {key!r}")
        intern(key)

    src: list[int] = []
    dst: list[int] = []
    rows = 0
    for row, pair in enumerate(edges, start=1):
        rows += 1
        if (not isinstance(pair, (tuple, list)) or len(pair) != 2
                or not all(isinstance(x, str) and x for x in pair)):
            raise ValueError(f"row {row}: malformed edge {pair!r}")
        src.append(intern(pair[0]))
        dst.append(intern(pair[1]))

    if not order:
        raise ValueError("empty input")

    n = len(order)
    u = np.asarray(src, dtype=np.int64)
    v = np.asarray(dst, dtype=np.int64)
    loops = u == v
    u, v = u[~loops], v[~loops]
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    codes = np.unique(lo * n + hi)
    g = _from_pairs(codes // n, codes % n, n, tuple(order))
    summary = CleaningSummary(
        rows_in=rows,
        loops_dropped=int(loops.sum()),
        duplicates_collapsed=int(len(lo) - len(codes)),
        isolated_nodes=int((g.degrees == 0).sum()),
    )
    if summary.loops_dropped or summary.duplicates_collapsed:
        log.info("build_graph: dropped %d self-loops, collapsed %d duplicate edges",
                 summary.loops_dropped, summary.duplicates_collapsed)
    return g, summary


def degree(g: Graph, v: int) -> int:
    if not 0 <= v < g.n:
        raise IndexError(f"node {v} out of range for graph with {g.n} nodes")
    return int(g.degrees[v])


def as_node_set(g: Graph, members: Iterable[int]) -> NodeSet:
    s = np.unique(np.fromiter(members, dtype=np.int64))
    if len(s) and (s[0] < 0 or s[-1] >= g.n):
        raise IndexError("node set contains ids outside the graph")
    return s


def keys_to_node_set(g: Graph, keys: Iterable[str]) -> NodeSet:
    """Map external keys to a NodeSet, silently skipping keys not in ``g``."""
    idx = g.key_index
    return as_node_set(g, (idx[k] for k in keys if k in idx))


@dataclass(frozen=True, eq=False)
class ComponentLabeling:
    """Component id per node; ids ordered by descending size (0 is the giant)."""

    labels: np.ndarray
    sizes: np.ndarray

    @property
    def count(self) -> int:
        return len(self.sizes)

    def members(self, cid: int) -> NodeSet:
        return np.flatnonzero(self.labels == cid)


def connected_components(g: Graph) -> ComponentLabeling:
    """Label connected components.

    Ordering is by size descending, ties broken by the smallest NodeId in the
    component, so labels are independent of traversal details.
    """
    if g.n == 0:
        return ComponentLabeling(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    _, raw = _cc(g.to_scipy(), directed=False)
    sizes = np.bincount(raw)
    # np.unique's first-occurrence index is the smallest node in each raw label
    _, first = np.unique(raw, return_index=True)
    rank = np.lexsort((first, -sizes))
    relabel = np.empty_like(rank)
    relabel[rank] = np.arange(len(rank))
    return ComponentLabeling(relabel[raw].astype(np.int64), sizes[rank].astype(np.int64))


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    """Subgraph on the nodes of ``s`` with every edge of ``g`` inside ``s``.

    Nodes are renumbered in ascending parent-id order; ``parent_ids`` maps
    them back to ``g``.
    """
    s = s if isinstance(s, np.ndarray) else np.fromiter(s, dtype=np.int64)
    s = as_node_set(g, s)
    if len(s) == 0:
        raise AnalysisError("empty subgraph request")
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[s] = np.arange(len(s))
    src, dst = g.edge_array()
    a, b = remap[src], remap[dst]
    keep = (a >= 0) & (b >= 0)
    keys = tuple(g.keys[i] for i in s)
    parent = s if g.parent_ids is None else g.parent_ids[s]
    return _from_pairs(a[keep], b[keep], len(s), keys, np.array(parent, dtype=np.int64))


def giant_component(g: Graph) -> Graph:
    if g.n < 1:
        raise AnalysisError("graph has no nodes")
    comps = connected_components(g)
    if comps.count == 1:
        return g
    return induced_subgraph(g, comps.members(0))


def top_fraction_by_degree(g: Graph, fraction: float) -> NodeSet:
    """The ``floor(fraction * n)`` highest-degree nodes.

    Ties at the cutoff go to the smaller NodeId.
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    # exact decimal arithmetic so e.g. 0.29 * 100 floors to 29, not 28
    count = int(Fraction(repr(float(fraction))) * g.n)
    order = np.lexsort((np.arange(g.n), -g.degrees))
    return np.sort(order[:count]).astype(np.int64)
