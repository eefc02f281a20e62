import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabnet.community import (LouvainConfig, Partition, _aggregate, _Level, _move_nodes,
                                 community_profile, community_sizes, louvain, modularity,
                                 partition_summary, partition_to_csv)
from collabnet.errors import UndefinedMetricError
from collabnet.ingest import ArtistCatalog, ArtistRecord

from conftest import K4_EDGES, make_graph
from oracles import best_modularity, modularity_direct, random_connected_graph, random_graph

K5 = [(a, b) for a in range(5) for b in range(a + 1, 5)]
TWO_K5 = K5 + [(a + 5, b + 5) for a, b in K5] + [(4, 5)]


def test_modularity_two_triangles():
    g = make_graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])
    assert modularity(g, [0, 0, 0, 1, 1, 1]) == pytest.approx(0.5, abs=1e-15)
    assert modularity(g, [7] * 6) == pytest.approx(0.0, abs=1e-15)


def test_modularity_matches_direct_formula():
    rng = random.Random(2)
    for _ in range(20):
        n = rng.randint(2, 25)
        edges = random_graph(rng, n, 0.3) or [(0, 1)]
        labels = [rng.randrange(4) for _ in range(n)]
        g = make_graph(n, edges)
        assert modularity(g, labels) == pytest.approx(modularity_direct(n, edges, labels),
                                                      abs=1e-12)


def test_modularity_needs_edges():
    with pytest.raises(UndefinedMetricError):
        modularity(make_graph(3, []), [0, 1, 2])


def test_louvain_two_k5():
    # brute-force optimum over all 115,975 partitions of 10 nodes: the two cliques
    q_best, labels = best_modularity(10, TWO_K5)
    assert labels == [0] * 5 + [1] * 5
    part = louvain(make_graph(10, TWO_K5))
    assert part.assignment.tolist() == [0] * 5 + [1] * 5
    assert part.modularity == pytest.approx(q_best, abs=1e-12)


def test_louvain_k4_single_community(k4):
    part = louvain(k4)
    assert part.community_count == 1
    assert part.modularity == pytest.approx(0.0, abs=1e-15)


def test_louvain_deterministic():
    rng = random.Random(4)
    edges = random_connected_graph(rng, 200, 0.02)
    g = make_graph(200, edges)
    cfg = LouvainConfig(seed=12)
    a, b = louvain(g, cfg), louvain(g, cfg)
    assert a.assignment.tolist() == b.assignment.tolist()
    assert a.modularity == b.modularity


def test_louvain_planted_partition():
    rng = random.Random(8)
    blocks, size = 8, 25
    edges = []
    for a in range(blocks * size):
        for b in range(a + 1, blocks * size):
            same = a // size == b // size
            if rng.random() < (0.4 if same else 0.005):
                edges.append((a, b))
    part = louvain(make_graph(blocks * size, edges), LouvainConfig(seed=1))
    assert part.community_count == blocks
    truth = [v // size for v in range(blocks * size)]
    assert part.modularity >= modularity_direct(blocks * size, edges, truth) - 1e-9


def test_louvain_levels_monotone_and_isolated_nodes():
    g = make_graph(12, TWO_K5)  # nodes 10, 11 isolated
    part = louvain(g)
    assert list(part.levels) == sorted(part.levels)
    assert part.community_count == 4
    assert community_sizes(part) == [5, 5, 1, 1]


def test_aggregate_preserves_weight():
    rng = random.Random(6)
    edges = random_connected_graph(rng, 80, 0.05)
    g = make_graph(80, edges)
    level = _Level.from_graph(g)
    comm = _move_nodes(level, list(range(80)), 1e-7)
    dense = np.unique(comm, return_inverse=True)[1].tolist()
    agg = _aggregate(level, dense)
    assert agg.total_weight() == pytest.approx(g.m)
    agg2 = _aggregate(agg, list(range(agg.size)))
    assert agg2.total_weight() == pytest.approx(g.m)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.floats(0.05, 0.6), st.integers(0, 10_000), st.integers(0, 50))
def test_louvain_output_is_valid_partition(n, p, gseed, lseed):
    edges = random_graph(random.Random(gseed), n, p)
    if not edges:
        return
    g = make_graph(n, edges)
    part = louvain(g, LouvainConfig(seed=lseed))
    a = part.assignment
    assert len(a) == n
    assert set(a.tolist()) == set(range(part.community_count))
    sizes = np.bincount(a)
    assert (np.diff(sizes) <= 0).all()
    assert -0.5 <= part.modularity <= 1
    assert part.modularity == pytest.approx(modularity(g, a), abs=1e-12)
    assert all(y >= x - 1e-12 for x, y in zip(part.levels, part.levels[1:]))


def test_config_validation():
    with pytest.raises(ValueError):
        LouvainConfig(min_gain=-1)
    with pytest.raises(ValueError):
        LouvainConfig(max_passes=0)


def test_community_sizes_small():
    part = Partition(np.array([0, 0, 1]), 0.0)
    assert community_sizes(part) == [2, 1]
    singletons = Partition(np.arange(5), 0.0)
    assert community_sizes(singletons) == [1] * 5


def test_community_profile():
    g = make_graph(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])
    part = Partition(np.array([0, 0, 0, 1, 1, 1]), 0.0)
    cat = ArtistCatalog({str(i): ArtistRecord(str(i), genres=("pop",)) for i in range(6)})
    prof = community_profile(g, part, 0, cat)
    assert prof.size == 3
    assert prof.metrics.transitivity == 1.0 and prof.metrics.diameter == 1
    assert prof.genres == [("pop", 3)]
    with pytest.raises(LookupError):
        community_profile(g, part, 5, cat)


def test_partition_serialization(k4):
    part = louvain(k4)
    assert partition_to_csv(k4, part).splitlines() == [
        "artist_key,community_id", "0,0", "1,0", "2,0", "3,0"]
    s = partition_summary(part)
    assert s["community_count"] == 1 and s["top_sizes"] == [4]
