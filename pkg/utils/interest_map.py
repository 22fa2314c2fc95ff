"""Interest maps: detect communities in an ego network and label each from profile text."""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import FrozenSet, List, Optional, Tuple

from .community import DETECTORS, Partition, detect
from .errors import InvalidParameterError
from .graph import DirectedGraph, ego_graph, undirected_projection
from .labeling import community_tokens, label_community

logger = logging.getLogger('egomap.interest_map')


@dataclass(frozen=True)
class MapConfig:
    detector: str = 'louvain'
    min_community_size: int = 3
    label_top_k: int = 5
    walk_length: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.detector not in DETECTORS:
            raise InvalidParameterError('detector', self.detector, f'expected one of {list(DETECTORS)}')
        for name in ('min_community_size', 'label_top_k', 'walk_length'):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InvalidParameterError(name, value, 'must be a positive integer')

    @classmethod
    def from_config(cls, cfg, **overrides) -> 'MapConfig':
        """Defaults from a ``config.Config`` class; ``None`` overrides are ignored."""
        base = cls(
            detector=cfg.DETECTOR,
            min_community_size=cfg.MIN_COMMUNITY_SIZE,
            label_top_k=cfg.LABEL_TOP_K,
            walk_length=cfg.WALK_LENGTH,
            seed=cfg.SEED,
        )
        return replace(base, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        return {
            'detector': self.detector,
            'min_community_size': self.min_community_size,
            'label_top_k': self.label_top_k,
            'walk_length': self.walk_length,
            'seed': self.seed,
        }


@dataclass(frozen=True)
class InterestGroup:
    community_id: int
    members: FrozenSet[str]
    label_terms: Tuple[Tuple[str, float], ...]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class InterestMap:
    ego: str
    groups: Tuple[InterestGroup, ...]
    detector: str
    dropped_vertices: FrozenSet[str]

    @property
    def vertices(self) -> FrozenSet[str]:
        covered = set(self.dropped_vertices)
        for group in self.groups:
            covered |= group.members
        return frozenset(covered)


def filter_communities(p: Partition, min_size: int) -> Tuple[List[FrozenSet[str]], FrozenSet[str]]:
    """Split communities into those with at least ``min_size`` members and the vertices of the rest."""
    if min_size < 1:
        raise InvalidParameterError('min_size', min_size, 'must be >= 1')
    kept, dropped = [], set()
    for members in p.communities():
        if len(members) >= min_size:
            kept.append(members)
        else:
            dropped |= members
    return kept, frozenset(dropped)


def build_interest_map(g: DirectedGraph, ego: str, cfg: Optional[MapConfig] = None, max_workers: int = 1) -> InterestMap:
    """ego_graph -> undirected projection -> detector -> size filter -> TF-IDF labels.

    Groups are ordered by size, largest first; equal sizes by smallest member id.
    """
    cfg = cfg or MapConfig()
    friends = ego_graph(g, ego)
    if len(friends) == 0:
        logger.info("ego %s follows nobody; empty interest map", ego)
        return InterestMap(ego, (), cfg.detector, frozenset())

    undirected = undirected_projection(friends)
    partition = detect(
        undirected,
        cfg.detector,
        seed=cfg.seed,
        walk_length=cfg.walk_length,
        max_workers=max_workers,
    )
    kept, dropped = filter_communities(partition, cfg.min_community_size)
    kept.sort(key=lambda members: (-len(members), min(members)))

    corpus = [community_tokens(members, friends.meta) for members in partition.communities()]
    groups = tuple(
        InterestGroup(
            community_id=idx,
            members=members,
            label_terms=tuple(label_community(members, friends.meta, corpus, cfg.label_top_k)),
        )
        for idx, members in enumerate(kept)
    )
    logger.info("interest map for %s: %d groups, %d dropped vertices (%s)",
                ego, len(groups), len(dropped), cfg.detector)
    return InterestMap(ego, groups, cfg.detector, dropped)
