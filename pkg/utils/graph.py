"""Directed follow graphs, ego networks and the undirected view detectors run on."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .errors import DanglingEdgeError, SelfLoopError, UnknownVertexError, InvalidParameterError

logger = logging.getLogger('egomap.graph')

Edge = Tuple[str, str]


@dataclass(frozen=True)
class VertexMeta:
    handle: str = ''
    description: str = ''
    follower_count: int = 0

    def __post_init__(self):
        if self.follower_count < 0:
            raise InvalidParameterError('follower_count', self.follower_count, 'must be >= 0')


@dataclass(frozen=True)
class DirectedGraph:
    """Immutable follow graph. ``edges`` holds (follower, followed) pairs."""
    meta: Mapping[str, VertexMeta]
    edges: FrozenSet[Edge]
    _out: Mapping[str, Tuple[str, ...]] = field(repr=False, compare=False)

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(self.meta)

    def out_neighbors(self, v: str) -> Tuple[str, ...]:
        if v not in self.meta:
            raise UnknownVertexError(v)
        return self._out[v]

    def __contains__(self, v: object) -> bool:
        return v in self.meta

    def __len__(self) -> int:
        return len(self.meta)


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple undirected graph with sorted vertex order and sorted neighbour tuples."""
    vertices: Tuple[str, ...]
    adjacency: Mapping[str, Tuple[str, ...]]

    @classmethod
    def from_edges(cls, vertices: Iterable[str], edges: Iterable[Edge]) -> 'UndirectedGraph':
        adj: Dict[str, set] = {v: set() for v in vertices}
        for a, b in edges:
            if a == b:
                raise SelfLoopError(a)
            for x in (a, b):
                if x not in adj:
                    raise DanglingEdgeError(a, b, x)
            adj[a].add(b)
            adj[b].add(a)
        ordered = tuple(sorted(adj))
        return cls(ordered, MappingProxyType({v: tuple(sorted(adj[v])) for v in ordered}))

    @property
    def edges(self) -> List[Edge]:
        """Edges as (a, b) with a < b, lexicographically sorted."""
        return [(a, b) for a in self.vertices for b in self.adjacency[a] if a < b]

    @property
    def m(self) -> int:
        return sum(len(n) for n in self.adjacency.values()) // 2

    @property
    def degree(self) -> Dict[str, int]:
        return {v: len(self.adjacency[v]) for v in self.vertices}

    def neighbors(self, v: str) -> Tuple[str, ...]:
        if v not in self.adjacency:
            raise UnknownVertexError(v)
        return self.adjacency[v]

    def has_edge(self, a: str, b: str) -> bool:
        return a in self.adjacency and b in self.adjacency[a]

    def without_edge(self, a: str, b: str) -> 'UndirectedGraph':
        adj = dict(self.adjacency)
        adj[a] = tuple(x for x in adj[a] if x != b)
        adj[b] = tuple(x for x in adj[b] if x != a)
        return UndirectedGraph(self.vertices, MappingProxyType(adj))

    def subgraph(self, keep: Iterable[str]) -> 'UndirectedGraph':
        keep = set(keep)
        ordered = tuple(v for v in self.vertices if v in keep)
        return UndirectedGraph(
            ordered,
            MappingProxyType({v: tuple(x for x in self.adjacency[v] if x in keep) for v in ordered}),
        )

    def __contains__(self, v: object) -> bool:
        return v in self.adjacency

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class PathCounts:
    """Breadth-first distances and shortest-path multiplicities from ``source``.

    ``dist[v]`` is None for unreachable vertices. ``order`` lists reachable
    vertices by nondecreasing distance and ``preds`` holds shortest-path
    predecessors, which betweenness accumulation walks in reverse.
    """
    source: str
    dist: Mapping[str, Optional[int]]
    sigma: Mapping[str, int]
    order: Tuple[str, ...] = ()
    preds: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)

    def reachable(self, v: str) -> bool:
        return self.dist.get(v) is not None


def _vertex_entry(record) -> Tuple[str, VertexMeta]:
    if isinstance(record, str):
        return record, VertexMeta()
    if isinstance(record, Mapping):
        vid = record.get('id')
        return vid, VertexMeta(
            handle=record.get('handle', '') or '',
            description=record.get('description', '') or '',
            follower_count=int(record.get('follower_count', 0) or 0),
        )
    vid, meta = record
    return vid, meta if isinstance(meta, VertexMeta) else VertexMeta(**meta)


def build_graph(vertex_records: Iterable, edge_records: Iterable) -> DirectedGraph:
    """Validate records and build an immutable :class:`DirectedGraph`.

    Vertex records are ids, ``(id, VertexMeta)`` pairs or mappings with an
    ``id`` key. Edge records are any (source, target) pair. Duplicate edges
    collapse; the result does not depend on record order.
    """
    meta: Dict[str, VertexMeta] = {}
    for record in vertex_records:
        vid, vm = _vertex_entry(record)
        if not vid:
            raise InvalidParameterError('vertex id', vid, 'must be a non-empty string')
        meta[vid] = vm

    edges = set()
    for record in edge_records:
        source, target = record
        if source == target:
            raise SelfLoopError(source)
        for x in (source, target):
            if x not in meta:
                raise DanglingEdgeError(source, target, x)
        edges.add((source, target))

    ordered = sorted(meta)
    out: Dict[str, list] = {v: [] for v in ordered}
    for s, t in edges:
        out[s].append(t)
    logger.debug("built graph with %d vertices and %d edges", len(ordered), len(edges))
    return DirectedGraph(
        meta=MappingProxyType({v: meta[v] for v in ordered}),
        edges=frozenset(edges),
        _out=MappingProxyType({v: tuple(sorted(out[v])) for v in ordered}),
    )


def ego_graph(g: DirectedGraph, ego: str) -> DirectedGraph:
    """Subgraph induced on the accounts ``ego`` follows, without ``ego`` itself."""
    if ego not in g:
        raise UnknownVertexError(ego)
    friends = set(g.out_neighbors(ego))
    friends.discard(ego)
    return build_graph(
        ((v, g.meta[v]) for v in friends),
        ((s, t) for s, t in g.edges if s in friends and t in friends),
    )


def undirected_projection(g: DirectedGraph) -> UndirectedGraph:
    """One undirected edge for every pair joined by at least one directed edge."""
    return UndirectedGraph.from_edges(g.vertices, g.edges)


def shortest_paths(g: UndirectedGraph, source: str) -> PathCounts:
    if source not in g:
        raise UnknownVertexError(source)
    dist: Dict[str, Optional[int]] = {v: None for v in g.vertices}
    sigma: Dict[str, int] = {v: 0 for v in g.vertices}
    preds: Dict[str, List[str]] = {v: [] for v in g.vertices}
    dist[source] = 0
    sigma[source] = 1
    order: List[str] = []
    queue = deque([source])
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in g.adjacency[v]:
            if dist[w] is None:
                dist[w] = dist[v] + 1
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return PathCounts(
        source=source,
        dist=MappingProxyType(dist),
        sigma=MappingProxyType(sigma),
        order=tuple(order),
        preds=MappingProxyType({v: tuple(p) for v, p in preds.items()}),
    )


def connected_components(g: UndirectedGraph) -> List[FrozenSet[str]]:
    """Components ordered by their smallest vertex id."""
    seen = set()
    components = []
    for v in g.vertices:
        if v in seen:
            continue
        reach = shortest_paths(g, v).order
        seen.update(reach)
        components.append(frozenset(reach))
    return components


def isolated_vertices(g: UndirectedGraph) -> List[str]:
    return [v for v in g.vertices if not g.adjacency[v]]


def to_networkx(g: UndirectedGraph):
    """Copy into a ``networkx.Graph`` (used by the swap null model and GraphML export)."""
    import networkx as nx

    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges)
    return G
