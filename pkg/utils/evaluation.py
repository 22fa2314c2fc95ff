"""Set-based recommendation baseline, precision/recall and partition similarity."""
from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Dict, FrozenSet, Hashable, Iterable, List, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score

from .community import Partition
from .errors import (
    EmptyGraphError,
    InvalidParameterError,
    NoCommonInterestError,
    PartitionMismatchError,
    UndefinedMetricError,
)


@dataclass(frozen=True)
class InterestSet:
    owner: str
    items: FrozenSet[Hashable]

    @classmethod
    def of(cls, owner: str, items: Iterable[Hashable]) -> 'InterestSet':
        return cls(owner, frozenset(items))


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ('tp', 'fp', 'fn'):
            if getattr(self, name) < 0:
                raise InvalidParameterError(name, getattr(self, name), 'must be >= 0')


def cf_recommend(a: InterestSet, b: InterestSet) -> Tuple[FrozenSet[Hashable], FrozenSet[Hashable]]:
    """A' = B - A for the owner of ``a`` and B' = A - B for the owner of ``b``.

    Two users with nothing in common give no basis for a recommendation.
    """
    if not (a.items & b.items):
        raise NoCommonInterestError(a.owner, b.owner)
    return b.items - a.items, a.items - b.items


def overlap_ratio(a: InterestSet, b: InterestSet) -> float:
    union = a.items | b.items
    if not union:
        raise UndefinedMetricError('overlap_ratio')
    return len(a.items & b.items) / len(union)


def precision(c: ConfusionCounts) -> float:
    if c.tp + c.fp == 0:
        raise UndefinedMetricError('precision')
    return c.tp / (c.tp + c.fp)


def recall(c: ConfusionCounts) -> float:
    """Only meaningful against planted truth; real interest sets are unobservable."""
    if c.tp + c.fn == 0:
        raise UndefinedMetricError('recall')
    return c.tp / (c.tp + c.fn)


def f_beta(c: ConfusionCounts, beta: float = 0.5) -> float:
    """Weighted harmonic mean of precision and recall; ``beta < 1`` favours precision."""
    if beta <= 0:
        raise InvalidParameterError('beta', beta, 'must be > 0')
    p, r = precision(c), recall(c)
    if p == 0 and r == 0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * p * r / (b2 * p + r)


def confusion_counts(predicted: AbstractSet, truth: AbstractSet) -> ConfusionCounts:
    predicted, truth = set(predicted), set(truth)
    return ConfusionCounts(
        tp=len(predicted & truth),
        fp=len(predicted - truth),
        fn=len(truth - predicted),
    )


def identified_fraction(predicted_groups: int, true_groups: int) -> float:
    """|A-hat| / |A|: share of planted interests recovered. Needs known truth."""
    if true_groups <= 0:
        raise UndefinedMetricError('identified_fraction')
    return predicted_groups / true_groups


def _aligned_labels(p: Partition, truth: Partition) -> Tuple[List[int], List[int]]:
    if p.vertices != truth.vertices:
        raise PartitionMismatchError(missing=truth.vertices - p.vertices, extra=p.vertices - truth.vertices)
    order = sorted(p.assignment)
    return [truth.assignment[v] for v in order], [p.assignment[v] for v in order]


def partition_similarity(p: Partition, truth: Partition) -> Tuple[float, float]:
    """(NMI with arithmetic-mean normalisation, adjusted Rand index)."""
    true_labels, pred_labels = _aligned_labels(p, truth)
    if not true_labels:
        raise EmptyGraphError('partitions have no vertices')
    nmi = normalized_mutual_info_score(true_labels, pred_labels, average_method='arithmetic')
    ari = adjusted_rand_score(true_labels, pred_labels)
    return float(nmi), float(ari)


def match_communities(p: Partition, truth: Partition) -> Dict[int, int]:
    """Maximum-overlap one-to-one matching of predicted communities to true blocks."""
    true_labels, pred_labels = _aligned_labels(p, truth)
    contingency = np.zeros((p.k, truth.k), dtype=np.int64)
    for t, q in zip(true_labels, pred_labels):
        contingency[q, t] += 1
    rows, cols = linear_sum_assignment(contingency, maximize=True)
    return {int(r): int(c) for r, c in zip(rows, cols) if contingency[r, c] > 0}


def community_confusion(p: Partition, truth: Partition, dropped: Iterable[str] = ()) -> ConfusionCounts:
    """Vertex-level counts after matching communities to blocks.

    Each kept vertex predicts the block its community is matched to (or none);
    the truth is every vertex paired with its own block. Dropped vertices make
    no prediction, so they only add false negatives.
    """
    dropped = set(dropped)
    matching = match_communities(p, truth)
    predicted = {(v, matching.get(c)) for v, c in p.assignment.items() if v not in dropped}
    actual = set(truth.assignment.items())
    return confusion_counts(predicted, actual)


def recovered_blocks(p: Partition, truth: Partition, min_overlap: float = 0.5) -> int:
    """Number of true blocks whose matched community holds more than ``min_overlap`` of it."""
    matching = match_communities(p, truth)
    pred_groups = p.communities()
    true_groups = truth.communities()
    hits = 0
    for c, t in matching.items():
        if len(pred_groups[c] & true_groups[t]) > min_overlap * len(true_groups[t]):
            hits += 1
    return hits
