"""Community detection: betweenness, modularity, Girvan-Newman, Louvain and walktrap.

All detectors are pure functions of (graph, parameters, seed). Ties are
broken by lexicographic vertex/edge order so seedless runs are reproducible.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import (
    DendrogramMismatchError,
    EmptyGraphError,
    InvalidParameterError,
    PartitionMismatchError,
)
from .graph import (
    Edge,
    UndirectedGraph,
    connected_components,
    isolated_vertices,
    shortest_paths,
    to_networkx,
)

logger = logging.getLogger('egomap.community')

_EPS = 1e-12
_TIE = 1e-9


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Disjoint assignment of every vertex to one of ``k`` nonempty communities."""
    assignment: Mapping[str, int]

    def __post_init__(self):
        used = set(self.assignment.values())
        if used != set(range(len(used))):
            raise InvalidParameterError('assignment', sorted(used), 'community indices must be 0..k-1 with none empty')

    @classmethod
    def from_communities(cls, groups: Iterable[Iterable[str]]) -> 'Partition':
        """Canonical partition: communities indexed by their smallest member."""
        groups = [frozenset(g) for g in groups if g]
        groups.sort(key=min)
        assignment: Dict[str, int] = {}
        for idx, members in enumerate(groups):
            for v in members:
                if v in assignment:
                    raise InvalidParameterError('communities', v, 'vertex assigned twice')
                assignment[v] = idx
        return cls({v: assignment[v] for v in sorted(assignment)})

    @classmethod
    def singletons(cls, vertices: Iterable[str]) -> 'Partition':
        return cls.from_communities([v] for v in vertices)

    @property
    def k(self) -> int:
        return len(set(self.assignment.values()))

    @property
    def vertices(self) -> FrozenSet[str]:
        return frozenset(self.assignment)

    def communities(self) -> List[FrozenSet[str]]:
        groups: List[set] = [set() for _ in range(self.k)]
        for v, c in self.assignment.items():
            groups[c].add(v)
        return [frozenset(g) for g in groups]

    def canonical(self) -> 'Partition':
        return Partition.from_communities(self.communities())

    def check_covers(self, vertices: Iterable[str]) -> None:
        vertices = set(vertices)
        mine = set(self.assignment)
        if mine != vertices:
            raise PartitionMismatchError(missing=vertices - mine, extra=mine - vertices)


@dataclass(frozen=True)
class PartitionQuality:
    q: float
    internal_edge_fraction: Tuple[float, ...]
    expected_fraction: Tuple[float, ...]


@dataclass(frozen=True)
class BetweennessScores:
    vertex_scores: Mapping[str, float]
    edge_scores: Mapping[Edge, float]


class Merge(NamedTuple):
    left: int
    right: int
    height: float


@dataclass(frozen=True)
class Dendrogram:
    """Merge history. Node ids ``0..n-1`` are the sorted leaves; merge ``i`` creates node ``n+i``.

    Fewer than ``n-1`` merges means a forest (disconnected components are
    never merged).
    """
    leaves: Tuple[str, ...]
    merges: Tuple[Merge, ...]

    def partition_at(self, level: int) -> Partition:
        """Partition after applying the first ``level`` merges."""
        n = len(self.leaves)
        members: Dict[int, List[str]] = {i: [v] for i, v in enumerate(self.leaves)}
        for i, merge in enumerate(self.merges[:level]):
            members[n + i] = members.pop(merge.left) + members.pop(merge.right)
        return Partition.from_communities(members.values())

    @property
    def levels(self) -> int:
        return len(self.merges) + 1


@dataclass(frozen=True)
class StopRule:
    """When Girvan-Newman stops dividing: ``count(k)`` or ``best_modularity()``.

    ``count(k)`` needs at least as many vertices as k and no more connected
    components than k.
    """
    kind: str
    k: Optional[int] = None

    @classmethod
    def count(cls, k: int) -> 'StopRule':
        if k < 1:
            raise InvalidParameterError('k', k, 'must be >= 1')
        return cls('count', k)

    @classmethod
    def best_modularity(cls) -> 'StopRule':
        return cls('best-modularity')


@dataclass(frozen=True)
class WalkDistance:
    t: int
    vertices: Tuple[str, ...]
    matrix: np.ndarray

    def __call__(self, a: str, b: str) -> float:
        idx = {v: i for i, v in enumerate(self.vertices)}
        return float(self.matrix[idx[a], idx[b]])

    @property
    def dist(self) -> Dict[Tuple[str, str], float]:
        n = len(self.vertices)
        return {
            (self.vertices[i], self.vertices[j]): float(self.matrix[i, j])
            for i in range(n) for j in range(i + 1, n)
        }


# ---------------------------------------------------------------------------
# Betweenness
# ---------------------------------------------------------------------------

def _edge_key(a: str, b: str) -> Edge:
    return (a, b) if a < b else (b, a)


def _source_dependencies(g: UndirectedGraph, source: str):
    """One Brandes accumulation pass: per-vertex and per-edge dependencies of ``source``."""
    paths = shortest_paths(g, source)
    delta = {v: 0.0 for v in paths.order}
    edge_delta: Dict[Edge, float] = {}
    for w in reversed(paths.order):
        for v in paths.preds[w]:
            c = paths.sigma[v] / paths.sigma[w] * (1.0 + delta[w])
            key = _edge_key(v, w)
            edge_delta[key] = edge_delta.get(key, 0.0) + c
            delta[v] += c
    delta[source] = 0.0
    return delta, edge_delta


def _betweenness(g: UndirectedGraph, max_workers: int = 1) -> BetweennessScores:
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            passes = list(pool.map(lambda s: _source_dependencies(g, s), g.vertices))
    else:
        passes = [_source_dependencies(g, s) for s in g.vertices]

    vertex_scores = {v: 0.0 for v in g.vertices}
    edge_scores = {e: 0.0 for e in g.edges}
    # summed in source order so the result is independent of max_workers
    for delta, edge_delta in passes:
        for v, d in delta.items():
            vertex_scores[v] += d
        for e, d in edge_delta.items():
            edge_scores[e] += d
    # every unordered pair was counted from both ends
    return BetweennessScores(
        vertex_scores={v: s / 2.0 for v, s in vertex_scores.items()},
        edge_scores={e: s / 2.0 for e, s in edge_scores.items()},
    )


def vertex_betweenness(g: UndirectedGraph, max_workers: int = 1) -> BetweennessScores:
    """Sum over unordered pairs {a, b} (a != b != v) of the fraction of a-b shortest paths through v."""
    return _betweenness(g, max_workers)


def edge_betweenness(g: UndirectedGraph, max_workers: int = 1) -> BetweennessScores:
    """Sum over unordered pairs of the fraction of their shortest paths crossing each edge."""
    return _betweenness(g, max_workers)


# ---------------------------------------------------------------------------
# Modularity
# ---------------------------------------------------------------------------

def _community_tallies(g: UndirectedGraph, p: Partition):
    p.check_covers(g.vertices)
    m = g.m
    if m == 0:
        raise EmptyGraphError('modularity is undefined when m = 0')
    internal = np.zeros(p.k)
    degree_sum = np.zeros(p.k)
    for v in g.vertices:
        degree_sum[p.assignment[v]] += len(g.adjacency[v])
    for a, b in g.edges:
        if p.assignment[a] == p.assignment[b]:
            internal[p.assignment[a]] += 1
    return m, internal, degree_sum


def modularity(g: UndirectedGraph, p: Partition) -> PartitionQuality:
    """Closed form Q = sum_c [e_c/m - (d_c/2m)^2]."""
    m, internal, degree_sum = _community_tallies(g, p)
    fractions = internal / m
    expected = (degree_sum / (2.0 * m)) ** 2
    return PartitionQuality(
        q=float(np.sum(fractions - expected)),
        internal_edge_fraction=tuple(float(x) for x in fractions),
        expected_fraction=tuple(float(x) for x in expected),
    )


def _stub_trial(stub_labels: np.ndarray, seed: int, trial: int, **_) -> float:
    """Each edge's endpoints drawn independently in proportion to degree."""
    rng = np.random.default_rng([seed, trial])
    draws = stub_labels[rng.integers(0, len(stub_labels), size=len(stub_labels))]
    ends = draws.reshape(-1, 2)
    return float(np.mean(ends[:, 0] == ends[:, 1]))


def _swap_trial(stub_labels, seed: int, trial: int, g: UndirectedGraph, p: Partition, swaps_per_edge: int) -> float:
    """Double-edge-swap rewiring with ``swaps_per_edge * m`` successful swaps; degrees preserved exactly.

    Up to ten tries per requested swap; graphs that admit few swaps keep the
    swaps already made.
    """
    import networkx as nx

    rng = np.random.default_rng([seed, trial])
    H = to_networkx(g)
    m = H.number_of_edges()
    if m >= 2 and H.number_of_nodes() >= 4:
        try:
            nswap = swaps_per_edge * m
            nx.double_edge_swap(H, nswap=nswap, max_tries=10 * nswap, seed=int(rng.integers(2**31)))
        except nx.NetworkXException:
            pass
    same = [p.assignment[a] == p.assignment[b] for a, b in H.edges()]
    return float(np.mean(same))


_NULL_MODELS: Dict[str, Callable[..., float]] = {
    'stub': _stub_trial,
    'swap': _swap_trial,
}


def modularity_monte_carlo(
    g: UndirectedGraph,
    p: Partition,
    trials: int,
    seed: int,
    null_model: str = 'stub',
    swaps_per_edge: int = 10,
    max_workers: int = 1,
) -> float:
    """Actual internal-edge fraction minus its mean over ``trials`` random null graphs.

    Each trial seeds its own generator from ``(seed, trial)``, so the estimate
    is the same for any ``max_workers``.
    """
    if trials < 1:
        raise InvalidParameterError('trials', trials, 'must be >= 1')
    if null_model not in _NULL_MODELS:
        raise InvalidParameterError('null_model', null_model, f'expected one of {sorted(_NULL_MODELS)}')
    m, internal, _ = _community_tallies(g, p)
    actual = float(internal.sum() / m)

    stub_labels = np.array(
        [p.assignment[v] for v in g.vertices for _ in range(len(g.adjacency[v]))], dtype=np.int64
    )
    trial_fn = _NULL_MODELS[null_model]
    run = lambda i: trial_fn(stub_labels, seed, i, g=g, p=p, swaps_per_edge=swaps_per_edge)
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            samples = list(pool.map(run, range(trials)))
    else:
        samples = [run(i) for i in range(trials)]
    return actual - float(np.mean(samples))


# ---------------------------------------------------------------------------
# Dendrogram cut
# ---------------------------------------------------------------------------

def cut_dendrogram(d: Dendrogram, g: UndirectedGraph) -> Partition:
    """Max-modularity level of ``d``; ties go to the level with fewer communities."""
    leaves, vertices = set(d.leaves), set(g.vertices)
    if leaves != vertices:
        raise DendrogramMismatchError(missing=vertices - leaves, extra=leaves - vertices)
    if not d.merges:
        return d.partition_at(0)

    best_level, best_q = None, -np.inf
    for level in range(len(d.merges), -1, -1):
        q = modularity(g, d.partition_at(level)).q
        if q > best_q + _EPS:
            best_level, best_q = level, q
    logger.debug("dendrogram cut at level %d of %d (Q=%.6f)", best_level, len(d.merges), best_q)
    return d.partition_at(best_level)


def _with_isolated(p: Partition, isolated: Sequence[str]) -> Partition:
    """Re-attach isolated vertices as singleton communities."""
    return Partition.from_communities(list(p.communities()) + [[v] for v in isolated])


# ---------------------------------------------------------------------------
# Girvan-Newman
# ---------------------------------------------------------------------------

def girvan_newman(g: UndirectedGraph, stop: StopRule, max_workers: int = 1) -> Tuple[Dendrogram, Partition]:
    """Divisive detection: repeatedly drop the highest edge-betweenness edge.

    Betweenness is recomputed from scratch after every removal. The run always
    continues until no edges remain so the dendrogram is the full split
    history; ``stop`` only decides which split state is returned.
    """
    n = len(g)
    if n == 0:
        raise EmptyGraphError('graph has no vertices')
    if stop.kind == 'count' and stop.k > n:
        raise InvalidParameterError('k', stop.k, f'exceeds vertex count {n}')

    components = connected_components(g)
    if stop.kind == 'count' and stop.k < len(components):
        raise InvalidParameterError('k', stop.k, f'graph already has {len(components)} connected components')
    states: List[Tuple[int, List[FrozenSet[str]]]] = [(0, list(components))]
    splits: List[Tuple[FrozenSet[str], FrozenSet[str], int]] = []
    current = g
    removed = 0
    while current.m > 0:
        scores = edge_betweenness(current, max_workers).edge_scores
        top = max(scores.values())
        a, b = min(e for e, s in scores.items() if s >= top - _TIE)
        current = current.without_edge(a, b)
        removed += 1

        owner = next(c for c in components if a in c)
        side = frozenset(shortest_paths(current.subgraph(owner), a).order)
        if b not in side:
            other = owner - side
            components = [c for c in components if c is not owner] + [side, other]
            splits.append((side, other, removed))
            states.append((removed, list(components)))
            logger.debug("removed %s-%s (score %.3f): %d components", a, b, top, len(components))

    # reversed splits are merges; heights count removals left after the split
    leaves = g.vertices
    node_of: Dict[FrozenSet[str], int] = {frozenset([v]): i for i, v in enumerate(leaves)}
    merges = []
    for left, right, at in reversed(splits):
        merges.append(Merge(node_of[left], node_of[right], float(removed - at + 1)))
        node_of[left | right] = n + len(merges) - 1
    dendrogram = Dendrogram(leaves, tuple(merges))

    if stop.kind == 'count':
        chosen = next((comps for _, comps in states if len(comps) >= stop.k), states[-1][1])
        return dendrogram, Partition.from_communities(chosen)
    if g.m == 0:
        return dendrogram, Partition.from_communities(components)
    return dendrogram, cut_dendrogram(dendrogram, g)


# ---------------------------------------------------------------------------
# Louvain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LouvainLevel:
    partition: Partition
    quality: PartitionQuality
    moves: int


def _local_moves(
    adj: List[Dict[int, float]],
    loops: List[float],
    two_m: float,
    order: Sequence[int],
) -> Tuple[List[int], int]:
    """Move nodes to the neighbouring community with the largest positive gain until stable."""
    n = len(adj)
    k = [sum(adj[i].values()) + 2.0 * loops[i] for i in range(n)]
    comm = list(range(n))
    tot = list(k)
    moves = 0
    improved = True
    while improved:
        improved = False
        for i in order:
            own = comm[i]
            links: Dict[int, float] = {}
            for j, w in adj[i].items():
                links[comm[j]] = links.get(comm[j], 0.0) + w
            tot[own] -= k[i]
            base = links.get(own, 0.0) - tot[own] * k[i] / two_m
            best, best_gain = own, base
            for c in sorted(links):
                gain = links[c] - tot[c] * k[i] / two_m
                if gain > best_gain + _EPS:
                    best, best_gain = c, gain
            tot[best] += k[i]
            if best != own:
                comm[i] = best
                moves += 1
                improved = True
    return comm, moves


def louvain_levels(g: UndirectedGraph, seed: int) -> List[LouvainLevel]:
    """Every aggregation level of a Louvain run, each flattened onto ``g``'s vertices.

    Q is nondecreasing across the returned levels.
    """
    if g.m == 0:
        raise EmptyGraphError('louvain needs at least one edge')
    rng = np.random.default_rng(seed)
    isolated = isolated_vertices(g)
    core = g.subgraph(v for v in g.vertices if g.adjacency[v])

    index = {v: i for i, v in enumerate(core.vertices)}
    adj: List[Dict[int, float]] = [
        {index[w]: 1.0 for w in core.adjacency[v]} for v in core.vertices
    ]
    loops = [0.0] * len(adj)
    two_m = 2.0 * core.m
    members: List[List[str]] = [[v] for v in core.vertices]
    levels: List[LouvainLevel] = []

    while True:
        order = rng.permutation(len(adj)).tolist()
        comm, moves = _local_moves(adj, loops, two_m, order)
        if moves == 0:
            break
        first_member: Dict[int, str] = {}
        for i, c in enumerate(comm):
            lead = min(members[i])
            if c not in first_member or lead < first_member[c]:
                first_member[c] = lead
        labels = sorted(first_member, key=first_member.get)
        relabel = {c: idx for idx, c in enumerate(labels)}

        new_members: List[List[str]] = [[] for _ in labels]
        new_adj: List[Dict[int, float]] = [{} for _ in labels]
        new_loops = [0.0] * len(labels)
        for i in range(len(adj)):
            ci = relabel[comm[i]]
            new_members[ci].extend(members[i])
            new_loops[ci] += loops[i]
            for j, w in adj[i].items():
                cj = relabel[comm[j]]
                if ci == cj:
                    # each internal edge is seen from both ends
                    new_loops[ci] += w / 2.0
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
        adj, loops, members = new_adj, new_loops, new_members

        flat = _with_isolated(Partition.from_communities(members), isolated)
        quality = modularity(g, flat)
        levels.append(LouvainLevel(flat, quality, moves))
        logger.debug("louvain level %d: %d communities, %d moves, Q=%.6f",
                     len(levels), len(members), moves, quality.q)
        if len(adj) == 1:
            break

    if not levels:
        flat = _with_isolated(Partition.from_communities(members), isolated)
        levels.append(LouvainLevel(flat, modularity(g, flat), 0))
    return levels


def louvain(g: UndirectedGraph, seed: int) -> Tuple[Partition, PartitionQuality]:
    """Greedy modularity maximisation with seeded vertex visit order."""
    final = louvain_levels(g, seed)[-1]
    return final.partition, final.quality


# ---------------------------------------------------------------------------
# Walktrap
# ---------------------------------------------------------------------------

def transition_power(g: UndirectedGraph, t: int) -> Tuple[np.ndarray, np.ndarray]:
    """P^t of the uniform random walk in ``g.vertices`` order, plus the degree vector."""
    if t < 1:
        raise InvalidParameterError('t', t, 'walk length must be >= 1')
    degree = np.array([len(g.adjacency[v]) for v in g.vertices], dtype=float)
    if np.any(degree == 0):
        raise InvalidParameterError('graph', isolated_vertices(g), 'random walks are undefined on isolated vertices')
    index = {v: i for i, v in enumerate(g.vertices)}
    A = np.zeros((len(g), len(g)))
    for a, b in g.edges:
        A[index[a], index[b]] = A[index[b], index[a]] = 1.0
    P = A / degree[:, None]
    return np.linalg.matrix_power(P, t), degree


def walk_distance(g: UndirectedGraph, t: int) -> WalkDistance:
    """r(i, j) = sqrt(sum_k (P^t_ik - P^t_jk)^2 / d(k)) for the uniform random walk."""
    Pt, degree = transition_power(g, t)
    scaled = Pt / np.sqrt(degree)[None, :]
    return WalkDistance(t=t, vertices=g.vertices, matrix=squareform(pdist(scaled)))


def walktrap(g: UndirectedGraph, t: int = 4) -> Tuple[Dendrogram, Partition]:
    """Agglomerative Ward merging of adjacent communities on t-step walk distances.

    The merge of C1 and C2 costs (1/n) * |C1||C2|/(|C1|+|C2|) * r^2(C1, C2);
    heights are the running total of those costs. Isolated vertices become
    singleton leaves that are never merged.
    """
    if len(g) == 0 or g.m == 0:
        raise EmptyGraphError('walktrap needs at least one edge')
    isolated = isolated_vertices(g)
    core = g.subgraph(v for v in g.vertices if g.adjacency[v])
    Pt, degree = transition_power(core, t)
    scaled = Pt / np.sqrt(degree)[None, :]
    n = len(core)
    leaves = g.vertices
    leaf_id = {v: i for i, v in enumerate(leaves)}

    # live communities keyed by dendrogram node id
    vec: Dict[int, np.ndarray] = {}
    size: Dict[int, int] = {}
    first: Dict[int, str] = {}
    neigh: Dict[int, set] = {}
    for i, v in enumerate(core.vertices):
        node = leaf_id[v]
        vec[node] = scaled[i]
        size[node] = 1
        first[node] = v
        neigh[node] = {leaf_id[w] for w in core.adjacency[v]}

    def cost(a: int, b: int) -> float:
        diff = vec[a] - vec[b]
        return (size[a] * size[b] / (size[a] + size[b])) * float(diff @ diff) / n

    pending: Dict[Tuple[int, int], float] = {}
    for a in neigh:
        for b in neigh[a]:
            if a < b:
                pending[(a, b)] = cost(a, b)

    merges: List[Merge] = []
    height = 0.0
    while pending:
        (a, b), delta = min(
            pending.items(),
            key=lambda kv: (round(kv[1], 12), *sorted((first[kv[0][0]], first[kv[0][1]]))),
        )
        height += delta
        node = len(leaves) + len(merges)
        merges.append(Merge(a, b, height))

        total = size[a] + size[b]
        vec[node] = (size[a] * vec[a] + size[b] * vec[b]) / total
        size[node] = total
        first[node] = min(first[a], first[b])
        neigh[node] = (neigh[a] | neigh[b]) - {a, b}
        for x in (a, b):
            for y in neigh[x]:
                neigh[y].discard(x)
                pending.pop((min(x, y), max(x, y)), None)
            del vec[x], size[x], first[x], neigh[x]
        pending.pop((a, b), None)
        for y in neigh[node]:
            neigh[y].add(node)
            pending[(min(y, node), max(y, node))] = cost(y, node)

    logger.debug("walktrap t=%d: %d merges over %d vertices (%d isolated)", t, len(merges), len(g), len(isolated))
    dendrogram = Dendrogram(leaves, tuple(merges))
    return dendrogram, cut_dendrogram(dendrogram, g)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

DETECTORS = ('girvan-newman', 'louvain', 'walktrap')


def detect(
    g: UndirectedGraph,
    detector: str,
    seed: int = 0,
    walk_length: int = 4,
    k: Optional[int] = None,
    max_workers: int = 1,
) -> Partition:
    """Run one of :data:`DETECTORS`; graphs without edges come back as singletons."""
    if detector not in DETECTORS:
        raise InvalidParameterError('detector', detector, f'expected one of {list(DETECTORS)}')
    if k is not None and detector != 'girvan-newman':
        raise InvalidParameterError('k', k, f'only girvan-newman takes a community count, not {detector}')
    if g.m == 0:
        if k is not None and k != len(g):
            raise InvalidParameterError('k', k, f'an edgeless graph has exactly {len(g)} components')
        return Partition.singletons(g.vertices)
    if detector == 'girvan-newman':
        stop = StopRule.count(k) if k is not None else StopRule.best_modularity()
        return girvan_newman(g, stop, max_workers)[1]
    if detector == 'louvain':
        return louvain(g, seed)[0]
    return walktrap(g, walk_length)[1]
