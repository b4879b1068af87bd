"""Bounded-degree graph data model and query meter."""

from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr


class ViolationKind:
    """Constants for graph invariant violations."""
    VERTEX_RANGE = "vertex-range"
    SELF_LOOP = "self-loop"
    DUPLICATE_EDGE = "duplicate-edge"
    DEGREE_CAP = "degree-cap"
    ASYMMETRY = "asymmetry"
    SIZE_MISMATCH = "size-mismatch"


class GraphViolation(BaseModel):
    """First invariant violation found by validate."""
    kind: str = Field(..., description="One of ViolationKind")
    vertex: Optional[int] = Field(default=None, description="Vertex where the violation was found")
    other: Optional[int] = Field(default=None, description="Second endpoint, for edge violations")
    message: str = Field(default="", description="Human readable description")


class ValidationReport(BaseModel):
    """Result of validating a BoundedDegreeGraph."""
    ok: bool
    violation: Optional[GraphViolation] = None


class DirectedEdge(BaseModel):
    """Directed view <tail, head> of an undirected edge (tail, head)."""
    model_config = ConfigDict(frozen=True)

    tail: int = Field(..., ge=0)
    head: int = Field(..., ge=0)

    def reversed(self) -> "DirectedEdge":
        return DirectedEdge(tail=self.head, head=self.tail)

    def undirected(self) -> Tuple[int, int]:
        return (min(self.tail, self.head), max(self.tail, self.head))

    def __str__(self) -> str:
        return f"<{self.tail},{self.head}>"


class QueryMeter(BaseModel):
    """Counts oracle calls made by sublinear algorithms.

    Counters only grow; reset() is the only way back to zero.
    """
    neighbor_queries: int = Field(default=0, ge=0)
    degree_queries: int = Field(default=0, ge=0)

    @property
    def total(self) -> int:
        return self.neighbor_queries + self.degree_queries

    def record_neighbor(self, count: int = 1) -> None:
        self.neighbor_queries += int(count)

    def record_degree(self, count: int = 1) -> None:
        self.degree_queries += int(count)

    def merge(self, other: "QueryMeter") -> None:
        """Add another meter's counts into this one."""
        self.neighbor_queries += other.neighbor_queries
        self.degree_queries += other.degree_queries

    def snapshot(self) -> "QueryMeter":
        return QueryMeter(neighbor_queries=self.neighbor_queries, degree_queries=self.degree_queries)

    def reset(self) -> None:
        self.neighbor_queries = 0
        self.degree_queries = 0


class BoundedDegreeGraph(BaseModel):
    """Simple undirected graph with vertices 0..n-1 and a hard degree cap d.

    The model itself accepts any adjacency so that invalid inputs can be
    inspected by validate(); use from_edges() to build a checked graph.
    Treat instances as immutable once built.
    """

    n: int = Field(..., ge=1, description="Vertex count")
    d: int = Field(..., ge=1, description="Degree bound")
    adjacency: Tuple[Tuple[int, ...], ...] = Field(..., description="Sorted neighbor list per vertex")

    _padded: np.ndarray = PrivateAttr()
    _degrees: np.ndarray = PrivateAttr()

    def model_post_init(self, __context) -> None:
        width = max(self.d, max((len(a) for a in self.adjacency), default=0), 1)
        padded = np.full((len(self.adjacency), width), -1, dtype=np.int64)
        degrees = np.zeros(len(self.adjacency), dtype=np.int64)
        for v, nbrs in enumerate(self.adjacency):
            padded[v, :len(nbrs)] = nbrs
            degrees[v] = len(nbrs)
        self._padded = padded
        self._degrees = degrees

    @classmethod
    def from_edges(cls, n: int, d: int, edges: Iterable[Tuple[int, int]]) -> "BoundedDegreeGraph":
        """Build a graph from an undirected edge list and check its invariants.

        Raises:
            GraphFormatError: If the result is not simple or exceeds the degree cap
        """
        from src.core.errors import GraphFormatError
        from src.core.oracle import validate

        lists: List[List[int]] = [[] for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"Edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            lists[u].append(v)
            if u != v:
                lists[v].append(u)
        graph = cls(n=n, d=d, adjacency=tuple(tuple(sorted(a)) for a in lists))

        report = validate(graph)
        if not report.ok:
            raise GraphFormatError(f"Invalid graph: {report.violation.message}")
        return graph

    @property
    def padded_adjacency(self) -> np.ndarray:
        """n x d array of neighbor ids padded with -1 (oracle internals only)."""
        return self._padded

    @property
    def degree_array(self) -> np.ndarray:
        return self._degrees

    @property
    def edge_count(self) -> int:
        return int(self._degrees.sum()) // 2

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Undirected edges (u, v) with u < v in sorted order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and v in self.adjacency[u]

    def __str__(self) -> str:
        return f"BoundedDegreeGraph(n={self.n}, d={self.d}, edges={self.edge_count})"
