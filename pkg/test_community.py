import itertools
import random

import networkx as nx
import numpy as np
import pytest

from utils.community import (
    Dendrogram,
    Merge,
    Partition,
    StopRule,
    cut_dendrogram,
    detect,
    edge_betweenness,
    girvan_newman,
    louvain,
    louvain_levels,
    modularity,
    modularity_monte_carlo,
    transition_power,
    vertex_betweenness,
    walk_distance,
    walktrap,
)
from utils.errors import DendrogramMismatchError, EmptyGraphError, InvalidParameterError, PartitionMismatchError
from utils.evaluation import partition_similarity
from utils.graph import UndirectedGraph
from utils.synthetic import planted_partition


def graph(edges, vertices=None):
    vertices = vertices if vertices is not None else {x for e in edges for x in e}
    return UndirectedGraph.from_edges(vertices, edges)


TWO_TRIANGLES = graph([('a', 'b'), ('b', 'c'), ('a', 'c'), ('d', 'e'), ('e', 'f'), ('d', 'f')])
BRIDGED = graph([('a', 'b'), ('b', 'u'), ('a', 'u'), ('u', 'v'), ('v', 'c'), ('c', 'd'), ('v', 'd')])
TRIANGLE_SPLIT = Partition.from_communities([{'a', 'b', 'c'}, {'d', 'e', 'f'}])
BRIDGED_SPLIT = Partition.from_communities([{'a', 'b', 'u'}, {'v', 'c', 'd'}])


def random_connected_graph(rng, n, p):
    ids = [f"n{i:02d}" for i in range(n)]
    order = ids[:]
    rng.shuffle(order)
    edges = {tuple(sorted((order[i - 1], order[i]))) for i in range(1, n)}
    for a, b in itertools.combinations(ids, 2):
        if rng.random() < p:
            edges.add((a, b))
    return graph(sorted(edges), ids)


def oracle_betweenness(g):
    """Exhaustive enumeration of all shortest paths with networkx."""
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges)
    vertex = {v: 0.0 for v in g.vertices}
    edge = {e: 0.0 for e in g.edges}
    for a, b in itertools.combinations(g.vertices, 2):
        if not nx.has_path(G, a, b):
            continue
        paths = list(nx.all_shortest_paths(G, a, b))
        for path in paths:
            for v in path[1:-1]:
                vertex[v] += 1.0 / len(paths)
            for x, y in zip(path, path[1:]):
                edge[tuple(sorted((x, y)))] += 1.0 / len(paths)
    return vertex, edge


# --- betweenness ---------------------------------------------------------

def test_vertex_betweenness_star():
    scores = vertex_betweenness(graph([('c', leaf) for leaf in 'wxyz'])).vertex_scores
    assert scores['c'] == pytest.approx(6.0)
    assert all(scores[leaf] == 0 for leaf in 'wxyz')


def test_vertex_betweenness_path_and_triangle():
    path = vertex_betweenness(graph([('a', 'b'), ('b', 'c')])).vertex_scores
    assert path == pytest.approx({'a': 0.0, 'b': 1.0, 'c': 0.0})
    tri = vertex_betweenness(graph([('a', 'b'), ('b', 'c'), ('a', 'c')])).vertex_scores
    assert set(tri.values()) == {0.0}


def test_edge_betweenness_examples():
    assert edge_betweenness(BRIDGED).edge_scores[('u', 'v')] == pytest.approx(9.0)
    assert edge_betweenness(graph([('a', 'b')])).edge_scores == pytest.approx({('a', 'b'): 1.0})
    tri = edge_betweenness(graph([('a', 'b'), ('b', 'c'), ('a', 'c')])).edge_scores
    assert all(s == pytest.approx(1.0) for s in tri.values())


def test_betweenness_matches_oracle():
    rng = random.Random(2024)
    for _ in range(200):
        g = random_connected_graph(rng, rng.randint(5, 10), rng.uniform(0.1, 0.5))
        vertex, edge = oracle_betweenness(g)
        scores = vertex_betweenness(g)
        for v in g.vertices:
            assert abs(scores.vertex_scores[v] - vertex[v]) <= 1e-9
        for e in g.edges:
            assert abs(scores.edge_scores[e] - edge[e]) <= 1e-9


def test_betweenness_same_with_workers():
    g = random_connected_graph(random.Random(5), 10, 0.3)
    assert vertex_betweenness(g, max_workers=4) == vertex_betweenness(g)


# --- modularity ----------------------------------------------------------

def test_modularity_two_triangles():
    quality = modularity(TWO_TRIANGLES, TRIANGLE_SPLIT)
    assert quality.q == pytest.approx(0.5)
    assert quality.internal_edge_fraction == pytest.approx((0.5, 0.5))
    assert quality.expected_fraction == pytest.approx((0.25, 0.25))


def test_modularity_single_community_is_zero():
    assert modularity(BRIDGED, Partition.from_communities([BRIDGED.vertices])).q == 0.0


def test_modularity_bridged_triangles():
    assert modularity(BRIDGED, BRIDGED_SPLIT).q == pytest.approx(2 * (3 / 7 - 0.25), abs=1e-6)
    assert modularity(BRIDGED, BRIDGED_SPLIT).q == pytest.approx(0.357143, abs=1e-6)


def test_modularity_matches_networkx():
    rng = random.Random(8)
    for _ in range(20):
        g = random_connected_graph(rng, 12, 0.25)
        p = Partition.from_communities([g.vertices[:5], g.vertices[5:9], g.vertices[9:]])
        G = nx.Graph(g.edges)
        expected = nx.community.modularity(G, [set(c) for c in p.communities()])
        assert modularity(g, p).q == pytest.approx(expected)


def test_modularity_errors():
    with pytest.raises(EmptyGraphError):
        modularity(graph([], ['a', 'b']), Partition.singletons(['a', 'b']))
    with pytest.raises(PartitionMismatchError):
        modularity(TWO_TRIANGLES, Partition.singletons('abc'))


def test_modularity_label_invariance():
    relabeled = Partition({v: 1 - c for v, c in TRIANGLE_SPLIT.assignment.items()})
    assert modularity(TWO_TRIANGLES, relabeled).q == modularity(TWO_TRIANGLES, TRIANGLE_SPLIT).q


def test_monte_carlo_single_community_is_exactly_zero():
    whole = Partition.from_communities([BRIDGED.vertices])
    assert modularity_monte_carlo(BRIDGED, whole, trials=50, seed=1) == 0.0
    assert modularity_monte_carlo(BRIDGED, whole, trials=5, seed=1, null_model='swap') == 0.0


def test_monte_carlo_close_to_closed_form():
    estimate = modularity_monte_carlo(TWO_TRIANGLES, TRIANGLE_SPLIT, trials=2000, seed=3)
    assert abs(estimate - 0.5) <= 0.02


def test_monte_carlo_is_deterministic():
    first = modularity_monte_carlo(BRIDGED, BRIDGED_SPLIT, trials=200, seed=9)
    assert modularity_monte_carlo(BRIDGED, BRIDGED_SPLIT, trials=200, seed=9) == first
    assert modularity_monte_carlo(BRIDGED, BRIDGED_SPLIT, trials=200, seed=9, max_workers=4) == first


def test_monte_carlo_on_louvain_partitions():
    for seed in range(20):
        planted = planted_partition(3, 10 + seed % 6, 0.5, 0.05, seed)
        partition, quality = louvain(planted.graph, seed)
        estimate = modularity_monte_carlo(planted.graph, partition, trials=2000, seed=seed)
        assert abs(estimate - quality.q) <= 0.02


def test_monte_carlo_rejects_bad_trials():
    with pytest.raises(InvalidParameterError):
        modularity_monte_carlo(TWO_TRIANGLES, TRIANGLE_SPLIT, trials=0, seed=0)


def test_swap_null_model_is_deterministic_across_workers():
    first = modularity_monte_carlo(BRIDGED, BRIDGED_SPLIT, trials=60, seed=4, null_model='swap')
    assert modularity_monte_carlo(BRIDGED, BRIDGED_SPLIT, trials=60, seed=4, null_model='swap') == first
    assert modularity_monte_carlo(BRIDGED, BRIDGED_SPLIT, trials=60, seed=4, null_model='swap', max_workers=3) == first


def test_swap_null_model_on_two_triangles_sits_near_point_six():
    # simple 2-regular graphs on six vertices average 0.4 internal edges per edge
    estimate = modularity_monte_carlo(TWO_TRIANGLES, TRIANGLE_SPLIT, trials=500, seed=3, null_model='swap')
    assert 0.56 < estimate < 0.64


def test_swap_null_model_tracks_closed_form_on_sparse_graph():
    planted = planted_partition(3, 20, 0.3, 0.02, 5)
    partition, quality = louvain(planted.graph, 5)
    estimate = modularity_monte_carlo(planted.graph, partition, trials=100, seed=5, null_model='swap')
    assert abs(estimate - quality.q) < 0.05


def test_monte_carlo_rejects_unknown_null_model():
    with pytest.raises(InvalidParameterError):
        modularity_monte_carlo(TWO_TRIANGLES, TRIANGLE_SPLIT, trials=10, seed=0, null_model='erdos')


# --- girvan-newman ------------------------------------------------------

def test_girvan_newman_splits_bridge_first():
    dendrogram, partition = girvan_newman(BRIDGED, StopRule.count(2))
    assert partition == BRIDGED_SPLIT
    assert modularity(BRIDGED, partition).q == pytest.approx(0.357143, abs=1e-6)
    assert set(dendrogram.leaves) == set(BRIDGED.vertices)
    assert len(dendrogram.merges) == len(BRIDGED.vertices) - 1


def test_girvan_newman_disconnected_graph():
    _, partition = girvan_newman(TWO_TRIANGLES, StopRule.count(2))
    assert partition == TRIANGLE_SPLIT


def test_girvan_newman_complete_graph_single_community():
    k4 = graph(list(itertools.combinations('abcd', 2)))
    _, partition = girvan_newman(k4, StopRule.count(1))
    assert partition.k == 1


def test_girvan_newman_best_modularity():
    _, partition = girvan_newman(BRIDGED, StopRule.best_modularity())
    assert partition == BRIDGED_SPLIT


def test_girvan_newman_k_too_large():
    with pytest.raises(InvalidParameterError):
        girvan_newman(TWO_TRIANGLES, StopRule.count(7))


def test_girvan_newman_k_below_component_count():
    with_isolated = graph(TWO_TRIANGLES.edges, list(TWO_TRIANGLES.vertices) + ['z'])
    with pytest.raises(InvalidParameterError) as exc:
        girvan_newman(with_isolated, StopRule.count(2))
    assert exc.value.name == 'k'
    _, partition = girvan_newman(with_isolated, StopRule.count(3))
    assert partition.k == 3


def test_girvan_newman_heights_nondecreasing():
    dendrogram, _ = girvan_newman(BRIDGED, StopRule.best_modularity())
    heights = [m.height for m in dendrogram.merges]
    assert heights == sorted(heights)


# --- louvain -------------------------------------------------------------

def test_louvain_two_triangles():
    partition, quality = louvain(TWO_TRIANGLES, seed=0)
    assert partition == TRIANGLE_SPLIT
    assert quality.q == pytest.approx(0.5)


def test_louvain_requires_edges():
    with pytest.raises(EmptyGraphError):
        louvain(graph([], ['a', 'b']), seed=0)


def test_louvain_q_nondecreasing_across_levels():
    planted = planted_partition(4, 25, 0.3, 0.01, 4)
    singleton_q = modularity(planted.graph, Partition.singletons(planted.graph.vertices)).q
    qs = [level.quality.q for level in louvain_levels(planted.graph, seed=4)]
    assert qs[0] >= singleton_q
    assert all(b >= a - 1e-12 for a, b in zip(qs, qs[1:]))


def test_louvain_recovers_planted_blocks():
    hits = 0
    for seed in range(20):
        planted = planted_partition(4, 25, 0.3, 0.01, seed)
        partition, _ = louvain(planted.graph, seed)
        hits += partition_similarity(partition, planted.truth)[1] >= 0.9
    assert hits >= 18


def test_louvain_is_seed_deterministic():
    planted = planted_partition(3, 12, 0.4, 0.05, 1)
    assert louvain(planted.graph, 5) == louvain(planted.graph, 5)


# --- walktrap ------------------------------------------------------------

def test_walk_distance_properties():
    rng = random.Random(1)
    for _ in range(10):
        g = random_connected_graph(rng, 9, 0.3)
        wd = walk_distance(g, 3)
        assert np.allclose(wd.matrix, wd.matrix.T)
        assert np.all(np.diag(wd.matrix) == 0)


def test_walk_distance_star_leaves_identical():
    wd = walk_distance(graph([('c', leaf) for leaf in 'wxyz']), 2)
    assert wd('w', 'x') == 0.0


def test_walk_distance_path():
    wd = walk_distance(graph([('a', 'b'), ('b', 'c')]), 1)
    assert wd('a', 'c') == 0.0
    assert wd('a', 'b') > 0.0
    assert wd.dist[('a', 'b')] == wd('b', 'a')


def test_walk_distance_rejects_zero_length():
    with pytest.raises(InvalidParameterError):
        walk_distance(TWO_TRIANGLES, 0)


def test_transition_power_rows_are_distributions():
    rng = random.Random(8)
    for t in (1, 2, 4, 7):
        g = random_connected_graph(rng, 12, 0.25)
        Pt, degree = transition_power(g, t)
        assert np.allclose(Pt.sum(axis=1), 1.0, atol=1e-9)
        assert (Pt >= 0).all()
        assert degree.sum() == 2 * g.m


def test_transition_power_rejects_isolated_vertices():
    with pytest.raises(InvalidParameterError):
        transition_power(graph([('a', 'b')], ['a', 'b', 'z']), 2)


def test_walktrap_examples():
    assert walktrap(TWO_TRIANGLES, 4)[1] == TRIANGLE_SPLIT
    assert walktrap(graph([('a', 'b'), ('b', 'c'), ('a', 'c')]), 4)[1].k == 1
    assert walktrap(BRIDGED, 4)[1] == BRIDGED_SPLIT


def test_walktrap_empty_graph():
    with pytest.raises(EmptyGraphError):
        walktrap(graph([], ['a']), 4)


def test_walktrap_keeps_isolated_vertices_as_singletons():
    g = graph([('a', 'b'), ('b', 'c'), ('a', 'c')], ['a', 'b', 'c', 'z'])
    _, partition = walktrap(g, 4)
    assert {'z'} in [set(c) for c in partition.communities()]


def test_walktrap_recovers_planted_blocks():
    hits = 0
    for seed in range(20):
        planted = planted_partition(4, 25, 0.3, 0.01, seed)
        _, partition = walktrap(planted.graph, 4)
        hits += partition_similarity(partition, planted.truth)[1] >= 0.8
    assert hits >= 16


# --- dendrogram cut ------------------------------------------------------

def test_cut_prefers_higher_modularity():
    d = Dendrogram(('a', 'b', 'c', 'd', 'e', 'f'), (
        Merge(0, 1, 1.0), Merge(6, 2, 2.0), Merge(3, 4, 1.0), Merge(8, 5, 2.0), Merge(7, 9, 3.0),
    ))
    assert cut_dendrogram(d, TWO_TRIANGLES) == TRIANGLE_SPLIT


def test_cut_single_leaf():
    assert cut_dendrogram(Dendrogram(('a',), ()), graph([], ['a'])) == Partition.singletons(['a'])


def test_cut_ties_go_to_fewer_communities():
    # {a,b},{z} and {a,b,z} both have Q = 0
    g = graph([('a', 'b')], ['a', 'b', 'z'])
    d = Dendrogram(('a', 'b', 'z'), (Merge(0, 1, 1.0), Merge(3, 2, 2.0)))
    assert cut_dendrogram(d, g).k == 1


def test_cut_leaf_mismatch():
    with pytest.raises(DendrogramMismatchError):
        cut_dendrogram(Dendrogram(('a', 'x'), ()), graph([('a', 'b')]))


# --- cross-detector properties -------------------------------------------

@pytest.mark.parametrize('blocks', [2, 3, 4])
@pytest.mark.parametrize('block_size', [3, 5])
def test_detectors_agree_on_disjoint_cliques(blocks, block_size):
    planted = planted_partition(blocks, block_size, 1.0, 0.0, 0)
    results = [detect(planted.graph, d, seed=1) for d in ('girvan-newman', 'louvain', 'walktrap')]
    assert all(r == planted.truth for r in results)


def test_detector_outputs_are_valid_partitions():
    rng = random.Random(77)
    for i in range(500):
        n = rng.randint(1, 9)
        ids = [f"n{j}" for j in range(n)]
        edges = [(a, b) for a, b in itertools.combinations(ids, 2) if rng.random() < 0.35]
        g = graph(edges, ids)
        detector = ('girvan-newman', 'louvain', 'walktrap')[i % 3]
        p = detect(g, detector, seed=i)
        assert p.vertices == frozenset(ids)
        groups = p.communities()
        assert all(groups)
        assert sum(len(c) for c in groups) == n
        if g.m:
            assert -0.5 <= modularity(g, p).q <= 1.0


def test_detect_community_count_only_for_girvan_newman():
    for detector in ('louvain', 'walktrap'):
        with pytest.raises(InvalidParameterError):
            detect(TWO_TRIANGLES, detector, k=2)
    assert detect(TWO_TRIANGLES, 'girvan-newman', k=2) == TRIANGLE_SPLIT
    assert detect(graph([], ['a', 'b']), 'girvan-newman', k=2) == Partition.singletons('ab')
    with pytest.raises(InvalidParameterError):
        detect(graph([], ['a', 'b']), 'girvan-newman', k=1)
