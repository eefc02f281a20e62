"""Louvain community detection and modularity.

Modularity uses resolution 1. The optimizer works on a private weighted
representation (neighbor-weight dicts plus self-loop weights) so that
aggregated levels can carry intra-community edge mass as self-loops.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import UndefinedMetricError
from .graph import Graph, giant_component, induced_subgraph
from .ingest import ArtistCatalog, genre_histogram
from .metrics import MetricsReport, diameter_exact, summarize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LouvainConfig:
    seed: int = 0
    min_gain: float = 1e-7
    max_passes: int = 50

    def __post_init__(self):
        if self.min_gain < 0:
            raise ValueError("min_gain must be >= 0")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")


@dataclass(frozen=True, eq=False)
class Partition:
    """Community id per node, ids ordered by descending community size.

    ``levels`` holds the modularity after each Louvain level (for other
    constructors it is just the final score).
    """

    assignment: np.ndarray
    modularity: float
    levels: tuple = ()

    @property
    def community_count(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cid)


def _dense(labels) -> np.ndarray:
    return np.unique(np.asarray(labels), return_inverse=True)[1].astype(np.int64)


def modularity(g: Graph, assignment) -> float:
    """Newman-Girvan modularity of a node -> community labelling."""
    if g.m == 0:
        raise UndefinedMetricError("modularity undefined for a graph without edges")
    labels = _dense(assignment)
    if len(labels) != g.n:
        raise ValueError("assignment must cover every node")
    src, dst = g.edge_array()
    cs = labels[src]
    intra = cs == labels[dst]
    c = int(labels.max()) + 1
    e = np.bincount(cs[intra], minlength=c).astype(np.float64)
    d = np.bincount(labels, weights=g.degrees.astype(np.float64), minlength=c)
    m = float(g.m)
    return float((e / m).sum() - ((d / (2 * m)) ** 2).sum())


def relabel_by_size(labels) -> np.ndarray:
    """Renumber communities by descending size, ties to the smallest member id."""
    labels = _dense(labels)
    sizes = np.bincount(labels)
    _, first = np.unique(labels, return_index=True)
    order = np.lexsort((first, -sizes))
    new = np.empty_like(order)
    new[order] = np.arange(len(order))
    return new[labels]


@dataclass
class _Level:
    adj: list          # list of {neighbor: weight}, no self entries
    self_w: list       # self-loop weight per node, each loop counted once

    @classmethod
    def from_graph(cls, g: Graph) -> "_Level":
        ptr = g.indptr.tolist()
        nbrs = g.indices.tolist()
        adj = [dict.fromkeys(nbrs[ptr[v]:ptr[v + 1]], 1.0) for v in range(g.n)]
        return cls(adj, [0.0] * g.n)

    @property
    def size(self) -> int:
        return len(self.adj)

    def strengths(self) -> list[float]:
        return [sum(a.values()) + 2 * s for a, s in zip(self.adj, self.self_w)]

    def total_weight(self) -> float:
        return sum(self.self_w) + sum(sum(a.values()) for a in self.adj) / 2


def _move_nodes(level: _Level, order, min_gain: float) -> list[int]:
    """Local moving phase; returns the community of every node."""
    k = level.strengths()
    m2 = sum(k)
    m = m2 / 2
    comm = list(range(level.size))
    tot = list(k)
    adj = level.adj
    while True:
        moves = 0
        for i in order:
            ci = comm[i]
            ki = k[i]
            links: dict[int, float] = {}
            for j, w in adj[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= ki
            stay = links.get(ci, 0.0) - tot[ci] * ki / m2
            best_c, best_delta = ci, 0.0
            for c in sorted(links):
                if c == ci:
                    continue
                delta = (links[c] - tot[c] * ki / m2 - stay) / m
                if delta > best_delta:
                    best_c, best_delta = c, delta
            if best_c != ci and best_delta > min_gain:
                comm[i] = best_c
                moves += 1
            tot[comm[i]] += ki
        if moves == 0:
            return comm


def _aggregate(level: _Level, comm: list[int]) -> _Level:
    c = max(comm) + 1
    adj: list[dict] = [{} for _ in range(c)]
    self_w = [0.0] * c
    for i, nbrs in enumerate(level.adj):
        ci = comm[i]
        self_w[ci] += level.self_w[i]
        row = adj[ci]
        for j, w in nbrs.items():
            cj = comm[j]
            if cj == ci:
                self_w[ci] += w / 2  # each internal edge is seen from both ends
            else:
                row[cj] = row.get(cj, 0.0) + w
    return _Level(adj, self_w)


def louvain(g: Graph, cfg: LouvainConfig | None = None) -> Partition:
    """Greedy two-phase modularity maximization.

    Each level sweeps nodes in a seeded random order, moving each to the
    neighboring community with the largest modularity gain above
    ``cfg.min_gain`` (ties go to the lowest community id) until a sweep makes
    no move, then collapses communities into weighted super-nodes. Levels
    repeat until modularity stops increasing or ``cfg.max_passes`` is hit.
    """
    cfg = cfg or LouvainConfig()
    if g.m == 0:
        raise UndefinedMetricError("louvain needs at least one edge")
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    level = _Level.from_graph(g)
    assignment = np.arange(g.n, dtype=np.int64)
    q = modularity(g, assignment)
    history = [q]
    for _ in range(cfg.max_passes):
        order = rng.permutation(level.size).tolist()
        comm = _move_nodes(level, order, cfg.min_gain)
        dense = _dense(comm)
        if int(dense.max()) + 1 == level.size:
            break
        candidate = dense[assignment]
        q_new = modularity(g, candidate)
        if q_new - q <= cfg.min_gain:
            break
        assignment, q = candidate, q_new
        history.append(q)
        level = _aggregate(level, dense.tolist())
    assert all(b >= a - 1e-12 for a, b in zip(history, history[1:])), history
    return Partition(relabel_by_size(assignment), q, tuple(history))


def community_sizes(part: Partition) -> list[int]:
    sizes = np.bincount(part.assignment)
    order = np.lexsort((np.arange(len(sizes)), -sizes))
    return [int(sizes[i]) for i in order]


@dataclass
class CommunityProfile:
    community_id: int
    size: int
    genres: list = field(default_factory=list)
    metrics: MetricsReport | None = None
    giant_diameter: int | None = None  # set when the community is disconnected

    def as_dict(self) -> dict:
        return {
            "community_id": self.community_id,
            "size": self.size,
            "genres": [[g, c] for g, c in self.genres],
            "metrics": self.metrics.as_dict() if self.metrics else None,
            "giant_diameter": self.giant_diameter,
        }


def community_profile(g: Graph, part: Partition, cid: int, catalog: ArtistCatalog | None = None,
                      top_genres: int = 20) -> CommunityProfile:
    if not 0 <= cid < part.community_count:
        raise LookupError(f"unknown community id {cid}")
    members = part.members(cid)
    sub = induced_subgraph(g, members)
    rep = summarize(sub)
    giant_d = None
    if rep.diameter == "disconnected":
        giant_d = diameter_exact(giant_component(sub))
    genres = []
    if catalog is not None:
        genres = genre_histogram(catalog, members, top_genres, g)
    return CommunityProfile(cid, len(members), genres, rep, giant_d)


def partition_to_csv(g: Graph, part: Partition) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["artist_key", "community_id"])
    for key, cid in zip(g.keys, part.assignment.tolist()):
        w.writerow([key, cid])
    return buf.getvalue()


def partition_summary(part: Partition, top_n: int = 20) -> dict:
    return {
        "community_count": part.community_count,
        "modularity": part.modularity,
        "top_sizes": community_sizes(part)[:top_n],
        "level_modularity": list(part.levels),
    }
