"""Structured errors raised on bad input or violated preconditions.

Every error derives from :class:`EgoMapError` so callers (the CLI in
particular) can tell user-facing input problems apart from internal bugs.
"""
from __future__ import annotations

from typing import Any, Iterable


class EgoMapError(ValueError):
    """Base class for input and precondition errors."""


class UnknownVertexError(EgoMapError):
    def __init__(self, vertex_id: str):
        self.vertex_id = vertex_id
        super().__init__(f"Unknown vertex id: {vertex_id!r}")


class DanglingEdgeError(EgoMapError):
    def __init__(self, source: str, target: str, missing: str):
        self.source = source
        self.target = target
        self.missing = missing
        super().__init__(f"Edge ({source!r}, {target!r}) references undeclared vertex {missing!r}")


class SelfLoopError(EgoMapError):
    def __init__(self, vertex_id: str):
        self.vertex_id = vertex_id
        super().__init__(f"Self-loop on vertex {vertex_id!r} is not allowed")


class EmptyGraphError(EgoMapError):
    def __init__(self, reason: str = "graph has no edges"):
        self.reason = reason
        super().__init__(f"Empty graph: {reason}")


class PartitionMismatchError(EgoMapError):
    def __init__(self, missing: Iterable[str] = (), extra: Iterable[str] = ()):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        super().__init__(
            f"Partition does not cover the graph: missing={self.missing[:5]} extra={self.extra[:5]}"
        )


class DendrogramMismatchError(EgoMapError):
    def __init__(self, missing: Iterable[str] = (), extra: Iterable[str] = ()):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        super().__init__(
            f"Dendrogram leaves differ from graph vertices: missing={self.missing[:5]} extra={self.extra[:5]}"
        )


class InvalidParameterError(EgoMapError):
    def __init__(self, name: str, value: Any, reason: str):
        self.name = name
        self.value = value
        self.reason = reason
        super().__init__(f"Invalid {name}={value!r}: {reason}")


class UndefinedMetricError(EgoMapError):
    def __init__(self, metric: str):
        self.metric = metric
        super().__init__(f"{metric} is undefined (0/0)")


class NoCommonInterestError(EgoMapError):
    def __init__(self, owner_a: str, owner_b: str):
        self.owner_a = owner_a
        self.owner_b = owner_b
        super().__init__(f"{owner_a!r} and {owner_b!r} share no interests; nothing to recommend")


class ParseError(EgoMapError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"Line {line}: {reason}")


class UsageError(EgoMapError):
    """Bad command-line usage (unknown subcommand or flag)."""
