import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabnet.errors import FitError, NotConnectedError, UndefinedMetricError
from collabnet.metrics import (DegreeDistribution, avg_local_clustering, degree_distribution,
                               density, diameter_exact, diameter_ifub, fit_power_law, summarize,
                               transitivity, triangle_count)

from conftest import K4_EDGES, make_graph
from oracles import (clustering_by_enumeration, diameter_all_pairs, random_connected_graph,
                     random_graph, triangles_by_enumeration)

K3 = [(0, 1), (1, 2), (0, 2)]
K4_MINUS = [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_density():
    assert density(make_graph(3, K3)) == 1.0
    with pytest.raises(UndefinedMetricError):
        density(make_graph(1, []))


@pytest.mark.parametrize("n", [2, 3, 7, 20])
def test_density_complete(n):
    g = make_graph(n, [(a, b) for a in range(n) for b in range(a + 1, n)])
    assert density(g) == 1.0


def test_clustering_small_cases(star5):
    k3 = make_graph(3, K3)
    assert avg_local_clustering(k3) == 1.0 and transitivity(k3) == 1.0
    assert avg_local_clustering(star5) == 0.0 and transitivity(star5) == 0.0
    k4m = make_graph(4, K4_MINUS)
    # nodes 0,1: 1 each; nodes 2,3: 2/3 each (oracle: clustering_by_enumeration)
    assert avg_local_clustering(k4m) == pytest.approx(5 / 6, abs=1e-15)
    assert transitivity(k4m) == pytest.approx(0.75, abs=1e-15)
    k23 = make_graph(5, [(a, b) for a in (0, 1) for b in (2, 3, 4)])
    assert transitivity(k23) == 0.0
    assert avg_local_clustering(make_graph(1, [])) == 0.0


def test_triangles_match_enumeration():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(3, 60)
        edges = random_graph(rng, n, rng.uniform(0.05, 0.5))
        assert triangle_count(make_graph(n, edges)) == triangles_by_enumeration(n, edges)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 40), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_clustering_bounds(n, p, seed):
    g = make_graph(n, random_graph(random.Random(seed), n, p))
    assert 0.0 <= transitivity(g) <= 1.0
    assert 0.0 <= avg_local_clustering(g) <= 1.0


def test_clustering_invariant_under_relabel():
    rng = random.Random(9)
    edges = random_graph(rng, 30, 0.3)
    perm = list(range(30))
    rng.shuffle(perm)
    g1 = make_graph(30, edges)
    g2 = make_graph(30, [(perm[a], perm[b]) for a, b in edges])
    assert density(g1) == density(g2)
    assert transitivity(g1) == transitivity(g2)
    assert avg_local_clustering(g1) == pytest.approx(avg_local_clustering(g2), abs=1e-15)


def test_diameter_small_cases(k4):
    assert diameter_exact(make_graph(4, [(0, 1), (1, 2), (2, 3)])) == 3
    assert diameter_exact(k4) == 1
    assert diameter_exact(make_graph(1, [])) == 0
    with pytest.raises(NotConnectedError, match="extract a component first"):
        diameter_exact(make_graph(4, [(0, 1), (2, 3)]))


def test_diameter_long_path_uses_pruning():
    n = 400
    g = make_graph(n, [(i, i + 1) for i in range(n - 1)])
    res = diameter_ifub(g)
    assert res.diameter == n - 1
    assert res.bfs_calls < 20


def test_diameter_matches_all_pairs_on_sparse_graphs():
    rng = random.Random(21)
    for _ in range(25):
        n = rng.randint(65, 300)
        edges = random_connected_graph(rng, n, rng.uniform(0.0, 3.0 / n))
        assert diameter_exact(make_graph(n, edges)) == diameter_all_pairs(n, edges)


def test_degree_distribution(k4):
    assert degree_distribution(k4).counts == {3: 4}
    d = degree_distribution(make_graph(3, [(0, 1)]))
    assert d.counts == {0: 1, 1: 2} and d.n == 3
    assert d.to_csv() == "degree,count\n0,1\n1,2\n"


def test_power_law_exact_line():
    counts = {k: 10 ** (6 - 2.5 * math.log10(k)) for k in range(1, 30)}
    fit = fit_power_law(DegreeDistribution(counts))
    assert fit.gamma == pytest.approx(2.5, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-9)
    assert fit.log_intercept == pytest.approx(6.0, abs=1e-9)


def test_power_law_rounded_synthetic():
    counts = {k: round(1e6 * k ** -2) for k in range(1, 51)}
    fit = fit_power_law(DegreeDistribution(counts))
    assert abs(fit.gamma - 2.0) < 0.01
    assert fit.r_squared > 0.999
    assert fit.fit_range == (1, 50) and fit.points_used == 50


def test_power_law_flat_and_errors():
    fit = fit_power_law(DegreeDistribution({k: 7 for k in range(1, 11)}))
    assert fit.gamma == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(FitError):
        fit_power_law(DegreeDistribution({0: 5, 1: 3, 2: 1}))
    fit = fit_power_law(DegreeDistribution({1: 100, 2: 0, 3: 10, 4: 5, 5: 0}), k_min=1)
    assert fit.points_used == 3


def test_power_law_kmin_range():
    counts = {k: round(1e6 * k ** -2) for k in range(1, 51)}
    fit = fit_power_law(DegreeDistribution(counts), k_min=5)
    assert fit.fit_range[0] == 5 and fit.points_used == 46


def test_summarize(k4):
    rep = summarize(k4)
    assert rep.as_dict()["diameter"] == 1
    d = rep.as_dict()
    for key in ("n", "m", "density", "avg_local_clustering", "transitivity", "diameter"):
        assert key in d
    assert summarize(make_graph(4, [(0, 1), (2, 3)])).diameter == "disconnected"


def test_summarize_disconnected_counts_isolated_in_average():
    g = make_graph(4, K3)
    rep = summarize(g)
    assert rep.transitivity == 1.0
    assert rep.avg_local_clustering == pytest.approx(0.75)
    assert np.isclose(rep.degree_mean, 1.5)
