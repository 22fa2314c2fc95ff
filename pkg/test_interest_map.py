import pytest

from config import TestingConfig
from utils.community import Partition
from utils.errors import InvalidParameterError, UnknownVertexError
from utils.graph import VertexMeta, build_graph
from utils.interest_map import MapConfig, build_interest_map, filter_communities
from utils.labeling import community_tokens, label_community, load_stopwords, tokenize
from utils.synthetic import EGO_ID, planted_ego_network


def test_tokenize_drops_short_tokens_and_stopwords():
    assert tokenize("The Chef's  kitchen, and I_love NBA!") == ['chef', 'kitchen', 'nba']


def test_tokenize_keeps_unicode_words():
    assert tokenize("Café crème brûlée") == ['café', 'crème', 'brûlée']


def test_label_community_tfidf_example():
    meta = {
        'a1': VertexMeta(description='chef recipes cooking'),
        'a2': VertexMeta(description='cooking recipes daily'),
        'b1': VertexMeta(description='nba basketball fan'),
    }
    corpus = [community_tokens({'a1', 'a2'}, meta), community_tokens({'b1'}, meta)]
    terms = [t for t, _ in label_community({'a1', 'a2'}, meta, corpus, top_k=5)]
    assert terms[:2] == ['cooking', 'recipes']
    assert not {'nba', 'basketball', 'fan'} & set(terms)


def test_label_community_empty_descriptions():
    meta = {'a': VertexMeta(), 'b': VertexMeta(description='')}
    assert label_community({'a', 'b'}, meta, [[]], top_k=3) == []


def test_label_community_single_document_ranks_by_frequency():
    meta = {'a': VertexMeta(description='guitar drums'), 'b': VertexMeta(description='guitar bass guitar')}
    tokens = community_tokens({'a', 'b'}, meta)
    labels = label_community({'a', 'b'}, meta, [tokens], top_k=3)
    assert [t for t, _ in labels] == ['guitar', 'bass', 'drums']
    assert labels[0][1] > labels[1][1] == labels[2][1]


def test_label_terms_respect_top_k_and_stopwords():
    meta = {'a': VertexMeta(description='the and of baking bread sourdough starter flour oven')}
    labels = label_community({'a'}, meta, [community_tokens({'a'}, meta)], top_k=2)
    assert len(labels) == 2
    assert not {t for t, _ in labels} & load_stopwords()


def test_label_community_rejects_bad_top_k():
    with pytest.raises(InvalidParameterError):
        label_community({'a'}, {}, [], top_k=0)


def test_filter_communities():
    p = Partition.from_communities([list('abcde'), list('fgh'), ['z']])
    kept, dropped = filter_communities(p, 3)
    assert sorted(len(c) for c in kept) == [3, 5]
    assert dropped == {'z'}
    assert filter_communities(p, 1) == (p.communities(), frozenset())
    kept, dropped = filter_communities(p, 6)
    assert kept == [] and dropped == set('abcdefghz')


def test_map_config_validation():
    with pytest.raises(InvalidParameterError):
        MapConfig(detector='kmeans')
    with pytest.raises(InvalidParameterError):
        MapConfig(min_community_size=0)
    cfg = MapConfig.from_config(TestingConfig, detector='walktrap', seed=None)
    assert cfg.detector == 'walktrap' and cfg.seed == TestingConfig.SEED


def test_map_for_ego_following_nobody():
    g = build_graph(['ego', 'b'], [('b', 'ego')])
    m = build_interest_map(g, 'ego')
    assert m.groups == () and m.dropped_vertices == frozenset()


def test_map_drops_small_communities():
    g = build_graph(['ego', 'b', 'c'], [('ego', 'b'), ('ego', 'c'), ('b', 'c')])
    m = build_interest_map(g, 'ego', MapConfig(min_community_size=3))
    assert m.groups == ()
    assert m.dropped_vertices == {'b', 'c'}


def test_map_unknown_ego():
    with pytest.raises(UnknownVertexError):
        build_interest_map(build_graph(['a'], []), 'nobody')


def test_map_friends_without_edges_are_dropped():
    g = build_graph(['ego', 'b', 'c', 'd'], [('ego', 'b'), ('ego', 'c'), ('ego', 'd')])
    m = build_interest_map(g, 'ego')
    assert m.groups == () and m.dropped_vertices == {'b', 'c', 'd'}


@pytest.mark.parametrize('seed', range(10))
def test_planted_vocabularies_label_their_groups(seed):
    g, planted = planted_ego_network(2, 12, 0.7, 0.02, seed)
    m = build_interest_map(g, EGO_ID, MapConfig(detector='louvain', seed=seed))
    assert len(m.groups) == 2
    assert sorted(group.label_terms[0][0] for group in m.groups) == ['basketball', 'cooking']
    assert m.vertices == frozenset(planted.graph.vertices)


def test_map_groups_tile_ego_network_and_are_ordered():
    g, planted = planted_ego_network(3, 8, 0.5, 0.05, 4)
    m = build_interest_map(g, EGO_ID, MapConfig(min_community_size=4))
    members = [v for group in m.groups for v in group.members]
    assert len(members) == len(set(members))
    assert set(members) | m.dropped_vertices == set(planted.graph.vertices)
    assert not set(members) & m.dropped_vertices
    sizes = [group.size for group in m.groups]
    assert sizes == sorted(sizes, reverse=True)
    assert all(len(group.label_terms) <= 5 for group in m.groups)


def test_map_is_deterministic():
    g, _ = planted_ego_network(3, 8, 0.5, 0.05, 9)
    cfg = MapConfig(detector='louvain', seed=3)
    assert build_interest_map(g, EGO_ID, cfg) == build_interest_map(g, EGO_ID, cfg)


@pytest.mark.parametrize('blocks,block_size', [(2, 3), (3, 5), (4, 5)])
def test_detectors_give_identical_maps_on_disjoint_cliques(blocks, block_size):
    g, _ = planted_ego_network(blocks, block_size, 1.0, 0.0, 0)
    maps = [
        build_interest_map(g, EGO_ID, MapConfig(detector=d, min_community_size=3))
        for d in ('girvan-newman', 'louvain', 'walktrap')
    ]
    assert maps[0].groups == maps[1].groups == maps[2].groups
