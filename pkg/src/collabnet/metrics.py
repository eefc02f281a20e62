"""Structural metrics: density, clustering, exact diameter, degree statistics."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from .errors import FitError, NotConnectedError, UndefinedMetricError
from .graph import Graph, connected_components

log = logging.getLogger(__name__)

# below this many nodes diameter_exact just runs BFS from every node
ALL_PAIRS_THRESHOLD = 64


def density(g: Graph) -> float:
    if g.n < 2:
        raise UndefinedMetricError("density needs at least 2 nodes")
    return 2.0 * g.m / (g.n * (g.n - 1))


def triangles_per_node(g: Graph) -> np.ndarray:
    """Number of triangles through each node.

    Edges are oriented from lower to higher (degree, id) rank and each
    triangle is found exactly once, at its lowest-ranked edge, by
    intersecting the two endpoints' forward neighbor lists.
    """
    n = g.n
    tri = np.zeros(n, dtype=np.int64)
    if g.m == 0:
        return tri
    rank = np.empty(n, dtype=np.int64)
    rank[np.lexsort((np.arange(n), g.degrees))] = np.arange(n)
    src = np.repeat(np.arange(n, dtype=np.int64), g.degrees)
    fwd = rank[g.indices] > rank[src]
    fwd_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src[fwd], minlength=n), out=fwd_ptr[1:])
    fwd_nbrs = g.indices[fwd].tolist()
    ptr = fwd_ptr.tolist()
    out = [set(fwd_nbrs[ptr[v]:ptr[v + 1]]) for v in range(n)]
    counts = [0] * n
    for u in range(n):
        out_u = out[u]
        if len(out_u) < 2:
            continue
        for v in fwd_nbrs[ptr[u]:ptr[u + 1]]:
            common = out_u & out[v]
            if common:
                c = len(common)
                counts[u] += c
                counts[v] += c
                for w in common:
                    counts[w] += 1
    tri[:] = counts
    return tri


def triangle_count(g: Graph) -> int:
    return int(triangles_per_node(g).sum() // 3)


def connected_triples(g: Graph) -> int:
    d = g.degrees.astype(np.int64)
    return int((d * (d - 1) // 2).sum())


def avg_local_clustering(g: Graph, tri: np.ndarray | None = None) -> float:
    """Mean local clustering over all nodes; degree < 2 contributes 0."""
    if g.n == 0:
        return 0.0
    if tri is None:
        tri = triangles_per_node(g)
    d = g.degrees.astype(np.float64)
    pairs = d * (d - 1) / 2
    local = np.divide(tri, pairs, out=np.zeros(g.n), where=pairs > 0)
    return float(local.mean())


def transitivity(g: Graph, tri: np.ndarray | None = None) -> float:
    """3 * triangles / connected triples (0 when there are no triples)."""
    triples = connected_triples(g)
    if triples == 0:
        return 0.0
    if tri is None:
        tri = triangles_per_node(g)
    return float(tri.sum()) / triples  # tri.sum() == 3 * triangles


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distance from ``source`` to every node; -1 where unreachable."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    indptr, indices = g.indptr, g.indices
    level = 0
    while len(frontier):
        level += 1
        starts = indptr[frontier]
        lens = indptr[frontier + 1] - starts
        total = int(lens.sum())
        if total == 0:
            break
        # gather all neighbor slices of the frontier in one shot
        offsets = np.repeat(starts - np.cumsum(lens) + lens, lens)
        nbrs = indices[offsets + np.arange(total)]
        nbrs = nbrs[dist[nbrs] < 0]
        if len(nbrs) == 0:
            break
        nbrs = np.unique(nbrs)
        dist[nbrs] = level
        frontier = nbrs
    return dist


def eccentricity(g: Graph, v: int) -> int:
    dist = bfs_distances(g, v)
    if (dist < 0).any():
        raise NotConnectedError("graph not connected; extract a component first")
    return int(dist.max())


@dataclass(frozen=True)
class DiameterResult:
    diameter: int
    bfs_calls: int
    lower_bound_sweep: int  # double-sweep lower bound before pruning


def diameter_ifub(g: Graph) -> DiameterResult:
    """Exact diameter via double sweep plus iFUB fringe pruning.

    The sweep starts at the highest-degree node; the iFUB root is the
    midpoint of the double-sweep path. Small graphs fall back to BFS from
    every node.
    """
    n = g.n
    if n == 0:
        raise UndefinedMetricError("diameter of an empty graph")
    if n == 1:
        return DiameterResult(0, 0, 0)

    calls = 0

    def bfs(v):
        nonlocal calls
        calls += 1
        return bfs_distances(g, int(v))

    hub = int(np.argmax(g.degrees))
    d_hub = bfs(hub)
    if (d_hub < 0).any():
        raise NotConnectedError("graph not connected; extract a component first")
    if n <= ALL_PAIRS_THRESHOLD:
        best = int(d_hub.max())
        for v in range(n):
            if v != hub:
                best = max(best, int(bfs(v).max()))
        return DiameterResult(best, calls, best)

    a = int(np.argmax(d_hub))
    d_a = bfs(a)
    b = int(np.argmax(d_a))
    span = int(d_a[b])
    d_b = bfs(b)
    sweep_lb = max(span, int(d_b.max()))
    on_path = np.flatnonzero((d_a + d_b == span) & (d_a == span // 2))
    root = int(on_path[0])
    d_root = bfs(root)

    ecc_root = int(d_root.max())
    lb = max(sweep_lb, ecc_root)
    ub = 2 * ecc_root
    i = ecc_root
    while ub > lb:
        for x in np.flatnonzero(d_root == i):
            lb = max(lb, int(bfs(x).max()))
        if lb > 2 * (i - 1):
            break
        ub = 2 * (i - 1)
        i -= 1
    return DiameterResult(lb, calls, sweep_lb)


def diameter_exact(g: Graph) -> int:
    return diameter_ifub(g).diameter


@dataclass(frozen=True)
class DegreeDistribution:
    counts: dict[int, int]

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "count"])
        for k, c in self.counts.items():
            w.writerow([k, c])
        return buf.getvalue()


def degree_distribution(g: Graph) -> DegreeDistribution:
    ks, cs = np.unique(g.degrees, return_counts=True)
    return DegreeDistribution({int(k): int(c) for k, c in zip(ks, cs)})


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares line through (log10 k, log10 count).

    ``gamma`` is the negated slope, so ``count ~ 10**log_intercept * k**-gamma``.
    """

    gamma: float
    log_intercept: float
    r_squared: float
    fit_range: tuple[int, int]
    points_used: int

    def as_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "log_intercept": self.log_intercept,
            "r_squared": self.r_squared,
            "fit_range": list(self.fit_range),
            "points_used": self.points_used,
        }


def fit_power_law(d: DegreeDistribution, k_min: int = 1, k_max: int | None = None) -> PowerLawFit:
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    pts = [(k, c) for k, c in sorted(d.counts.items())
           if c > 0 and k >= k_min and (k_max is None or k <= k_max)]
    if len(pts) < 3:
        raise FitError(f"power-law fit needs >= 3 nonzero degree bins, got {len(pts)}")
    x = np.log10([k for k, _ in pts])
    y = np.log10([c for _, c in pts])
    xm, ym = x.mean(), y.mean()
    sxx = ((x - xm) ** 2).sum()
    slope = ((x - xm) * (y - ym)).sum() / sxx
    intercept = ym - slope * xm
    ss_res = ((y - (intercept + slope * x)) ** 2).sum()
    ss_tot = ((y - ym) ** 2).sum()
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(
        gamma=float(-slope),
        log_intercept=float(intercept),
        r_squared=float(min(max(r2, 0.0), 1.0)),
        fit_range=(pts[0][0], pts[-1][0]),
        points_used=len(pts),
    )


@dataclass
class MetricsReport:
    n: int
    m: int
    density: float | None
    avg_local_clustering: float
    transitivity: float
    diameter: int | str  # "disconnected" when undefined
    degree_min: float
    degree_mean: float
    degree_max: float
    triangles: int = 0

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "density": self.density,
            "avg_local_clustering": self.avg_local_clustering,
            "transitivity": self.transitivity,
            "diameter": self.diameter,
            "degree_min": self.degree_min,
            "degree_mean": self.degree_mean,
            "degree_max": self.degree_max,
            "triangles": self.triangles,
        }


def summarize(g: Graph, with_diameter: bool = True) -> MetricsReport:
    """Compute every metric for ``g``.

    A disconnected graph gets ``diameter="disconnected"``; callers wanting a
    number should pass the giant component.
    """
    tri = triangles_per_node(g)
    diam: int | str = "disconnected"
    if with_diameter and g.n >= 1:
        if g.n == 1 or connected_components(g).count == 1:
            diam = diameter_exact(g)
    elif not with_diameter:
        diam = "skipped"
    deg = g.degrees
    return MetricsReport(
        n=g.n,
        m=g.m,
        density=density(g) if g.n >= 2 else None,
        avg_local_clustering=avg_local_clustering(g, tri),
        transitivity=transitivity(g, tri),
        diameter=diam,
        degree_min=float(deg.min()) if g.n else 0.0,
        degree_mean=float(deg.mean()) if g.n else 0.0,
        degree_max=float(deg.max()) if g.n else 0.0,
        triangles=int(tri.sum() // 3),
    )

