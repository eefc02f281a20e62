import math

import numpy as np
import pytest

from collabnet.baselines import (LatticeSpec, compare_small_world, er_graph, ErSpec,
                                 lattice_diameter_analytic, lattice_k_for_density, matched_er,
                                 ring_lattice)
from collabnet.errors import AnalysisError, NotConnectedError
from collabnet.metrics import avg_local_clustering, density, diameter_exact

from conftest import make_graph
from oracles import diameter_all_pairs


def edge_set(g):
    return set(zip(*(a.tolist() for a in g.edge_array())))


def test_er_extremes():
    assert matched_er(100, 0.0, 1).m == 0
    full = matched_er(100, 1.0, 1)
    assert full.m == 100 * 99 // 2 and density(full) == 1.0
    with pytest.raises(ValueError):
        matched_er(100, 1.5, 0)
    with pytest.raises(ValueError):
        matched_er(1, 0.5, 0)


def test_er_deterministic_and_seed_sensitive():
    a = matched_er(500, 0.02, 7)
    b = matched_er(500, 0.02, 7)
    c = matched_er(500, 0.02, 8)
    assert edge_set(a) == edge_set(b)
    assert edge_set(a) != edge_set(c)


def test_er_pairs_are_valid_and_cover_index_space():
    g = er_graph(ErSpec(60, 0.5, 3))
    u, v = g.edge_array()
    assert (u < v).all() and v.max() < 60
    # both the first and the last pair of the index order are reachable
    pairs = edge_set(er_graph(ErSpec(3, 0.999999, 1)))
    assert pairs == {(0, 1), (0, 2), (1, 2)}


def test_er_edge_count_mean():
    n, p = 2000, 0.01
    pairs = n * (n - 1) // 2
    sigma = math.sqrt(pairs * p * (1 - p))
    counts = [matched_er(n, p, s).m for s in range(30)]
    assert abs(np.mean(counts) - pairs * p) < 3 * sigma / math.sqrt(30)


@pytest.mark.parametrize("n, dens, k", [
    (148_386, 2.458e-5, 4),
    (19_562, 3.77e-4, 8),
    (677, 2 * 1851 / (677 * 676), 6),
])
def test_lattice_k_for_density(n, dens, k):
    assert lattice_k_for_density(n, dens) == k


def test_lattice_k_rounding_and_limits():
    # mean degree exactly 3 sits between 2 and 4: rounds up
    assert lattice_k_for_density(101, 3 / 100) == 4
    assert lattice_k_for_density(101, 0.001) == 2
    with pytest.raises(AnalysisError, match="density too high"):
        lattice_k_for_density(4, 1.0)


def test_ring_lattice():
    c6 = ring_lattice(LatticeSpec(6, 2))
    assert c6.m == 6 and diameter_exact(c6) == 3
    g = ring_lattice(LatticeSpec(12, 4))
    assert set(g.degrees.tolist()) == {4}
    assert diameter_exact(g) == 3
    for bad in [(10, 3), (10, 0), (6, 6)]:
        with pytest.raises(ValueError):
            LatticeSpec(*bad)


@pytest.mark.parametrize("n, k, d", [(148_386, 4, 37_097), (19_562, 8, 2_446), (677, 6, 113),
                                     (6, 2, 3), (12, 4, 3)])
def test_lattice_diameter_analytic(n, k, d):
    assert lattice_diameter_analytic(n, k) == d


def test_lattice_diameter_analytic_matches_bfs_oracle_small():
    for n in range(5, 40):
        for k in range(2, min(10, n - 1) + 1, 2):
            g = ring_lattice(LatticeSpec(n, k))
            edges = list(zip(*(a.tolist() for a in g.edge_array())))
            assert lattice_diameter_analytic(n, k) == diameter_all_pairs(n, edges), (n, k)


def test_compare_small_world_k4(k4):
    rep = compare_small_world(k4, seed=3).as_dict()
    assert rep["target"]["transitivity"] == 1.0
    assert rep["er"]["seed"] == 3 and rep["er"]["p"] == 1.0
    assert rep["lattice"]["k"] is None and "note" in rep["lattice"]
    assert set(rep) == {"target", "er", "lattice", "ratios"}
    assert rep["ratios"]["clustering_ratio_vs_er"] == 1.0


def test_compare_small_world_on_clustered_graph():
    # ring of 20 six-cliques, each joined to the next: clustered and sparse
    edges = []
    for t in range(20):
        base = 6 * t
        edges += [(base + a, base + b) for a in range(6) for b in range(a + 1, 6)]
        edges.append((base + 5, (base + 6) % 120))
    g = make_graph(120, edges)
    rep = compare_small_world(g, seed=1, er_instances=3).as_dict()
    lat = rep["lattice"]
    assert lat["k"] == 6  # mean degree 16/3
    assert lat["diameter_analytic"] == lattice_diameter_analytic(120, 6) == 20
    assert lat["diameter_bfs_verified"] is True
    assert rep["er"]["metrics_on"] in {"giant_component", "whole_instance"}
    assert rep["er"]["metrics"]["n"] <= 120
    assert len(rep["er"]["seeds"]) == 3
    assert rep["ratios"]["clustering_ratio_vs_er"] > 1
    assert rep["er"]["expected_avg_local_clustering"] == density(g)


def test_compare_small_world_requires_connected():
    with pytest.raises(NotConnectedError):
        compare_small_world(make_graph(4, [(0, 1), (2, 3)]))


def test_er_avg_local_clustering_near_p():
    vals = [avg_local_clustering(matched_er(2000, 0.01, s)) for s in range(10)]
    se = np.std(vals, ddof=1) / math.sqrt(len(vals))
    assert abs(np.mean(vals) - 0.01) < 3 * se
