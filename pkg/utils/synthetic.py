"""Planted-partition graphs with known communities.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), whose
streams are identical across platforms for a given seed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .community import Partition
from .errors import InvalidParameterError
from .graph import DirectedGraph, UndirectedGraph, VertexMeta, build_graph

EGO_ID = 'ego'

# head term first; every member of a block mentions the head term
VOCABULARIES: Tuple[Tuple[str, ...], ...] = (
    ('cooking', 'recipes', 'chef', 'kitchen', 'baking', 'foodie', 'pasta'),
    ('basketball', 'nba', 'hoops', 'dunk', 'playoffs', 'court', 'rebounds'),
    ('photography', 'camera', 'lens', 'portraits', 'landscape', 'darkroom', 'aperture'),
    ('astronomy', 'telescope', 'galaxy', 'nebula', 'planets', 'stargazing', 'comet'),
    ('gardening', 'compost', 'seedlings', 'tomatoes', 'pruning', 'orchard', 'perennials'),
    ('chess', 'openings', 'endgame', 'grandmaster', 'blitz', 'gambit', 'tactics'),
)


@dataclass(frozen=True)
class PlantedGraph:
    graph: UndirectedGraph
    truth: Partition
    params: Tuple[int, int, float, float, int]


def _check_params(blocks: int, block_size: int, p_in: float, p_out: float) -> None:
    if blocks < 1:
        raise InvalidParameterError('blocks', blocks, 'must be >= 1')
    if block_size < 1:
        raise InvalidParameterError('block_size', block_size, 'must be >= 1')
    if not 0.0 <= p_out <= p_in <= 1.0:
        raise InvalidParameterError('p_in/p_out', (p_in, p_out), 'need 0 <= p_out <= p_in <= 1')


def vertex_ids(n: int) -> List[str]:
    """Zero-padded ids so lexicographic order matches numeric order."""
    width = max(3, len(str(max(n - 1, 0))))
    return [f"v{i:0{width}d}" for i in range(n)]


def planted_partition(blocks: int, block_size: int, p_in: float, p_out: float, seed: int) -> PlantedGraph:
    """Independent coin flip per vertex pair: ``p_in`` inside a block, ``p_out`` across."""
    _check_params(blocks, block_size, p_in, p_out)
    n = blocks * block_size
    ids = vertex_ids(n)
    block_of = np.repeat(np.arange(blocks), block_size)
    rng = np.random.default_rng(seed)

    rows, cols = np.triu_indices(n, k=1)
    prob = np.where(block_of[rows] == block_of[cols], p_in, p_out)
    keep = rng.random(len(rows)) < prob
    edges = [(ids[i], ids[j]) for i, j in zip(rows[keep].tolist(), cols[keep].tolist())]

    truth = Partition.from_communities(
        [ids[b * block_size:(b + 1) * block_size] for b in range(blocks)]
    )
    return PlantedGraph(
        graph=UndirectedGraph.from_edges(ids, edges),
        truth=truth,
        params=(blocks, block_size, float(p_in), float(p_out), int(seed)),
    )


def planted_metadata(planted: PlantedGraph, seed: int, words_per_profile: int = 2) -> Dict[str, VertexMeta]:
    """Profile text per vertex: the block's head term plus a few words from its vocabulary."""
    rng = np.random.default_rng([seed, 1])
    meta: Dict[str, VertexMeta] = {}
    for v in sorted(planted.truth.assignment):
        vocab = VOCABULARIES[planted.truth.assignment[v] % len(VOCABULARIES)]
        extra = rng.choice(len(vocab) - 1, size=min(words_per_profile, len(vocab) - 1), replace=False) + 1
        words = [vocab[0]] + [vocab[i] for i in sorted(extra.tolist())]
        meta[v] = VertexMeta(
            handle=f"@{v}",
            description=' '.join(words),
            follower_count=int(rng.integers(0, 10_000)),
        )
    return meta


def planted_ego_network(
    blocks: int,
    block_size: int,
    p_in: float,
    p_out: float,
    seed: int,
    reciprocity: float = 0.5,
) -> Tuple[DirectedGraph, PlantedGraph]:
    """Directed follow graph of an ego who follows every planted vertex.

    Each planted undirected edge becomes one follow in a random direction, or
    a mutual follow with probability ``reciprocity``.
    """
    planted = planted_partition(blocks, block_size, p_in, p_out, seed)
    meta = planted_metadata(planted, seed)
    rng = np.random.default_rng([seed, 2])

    follows: List[Tuple[str, str]] = []
    for a, b in planted.graph.edges:
        if rng.random() < reciprocity:
            follows.extend([(a, b), (b, a)])
        elif rng.random() < 0.5:
            follows.append((a, b))
        else:
            follows.append((b, a))
    follows.extend((EGO_ID, v) for v in planted.graph.vertices)

    vertices: List = [(EGO_ID, VertexMeta(handle='@ego'))] + list(meta.items())
    return build_graph(vertices, follows), planted


def expected_edge_count(blocks: int, block_size: int, p_in: float, p_out: float) -> Tuple[float, float]:
    """Mean and standard deviation of the planted edge count."""
    _check_params(blocks, block_size, p_in, p_out)
    inner = blocks * block_size * (block_size - 1) // 2
    total = blocks * block_size * (blocks * block_size - 1) // 2
    outer = total - inner
    mean = inner * p_in + outer * p_out
    var = inner * p_in * (1 - p_in) + outer * p_out * (1 - p_out)
    return mean, float(np.sqrt(var))
