"""Neighbor-query oracle for bounded-degree graphs.

Sublinear code (walks, tester) reads the graph only through the functions in
this module and passes a QueryMeter to every call. Batch variants count one
query per element, so a vectorised walk is metered exactly like the scalar one.
"""

from typing import List

import numpy as np

from src.core.errors import InvalidArgumentError
from src.models.graph import (
    BoundedDegreeGraph,
    GraphViolation,
    QueryMeter,
    ValidationReport,
    ViolationKind,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)


def _check_vertex(graph: BoundedDegreeGraph, v: int) -> None:
    if not 0 <= v < graph.n:
        raise InvalidArgumentError(f"Vertex {v} is outside 0..{graph.n - 1}")


def neighbors(graph: BoundedDegreeGraph, v: int, meter: QueryMeter) -> List[int]:
    """Return v's neighbors in ascending id order.

    Raises:
        InvalidArgumentError: If v is not a vertex of the graph
    """
    _check_vertex(graph, v)
    meter.record_neighbor()
    return list(graph.adjacency[v])


def degree(graph: BoundedDegreeGraph, v: int, meter: QueryMeter) -> int:
    """Return the degree of v.

    Raises:
        InvalidArgumentError: If v is not a vertex of the graph
    """
    _check_vertex(graph, v)
    meter.record_degree()
    return len(graph.adjacency[v])


def degree_batch(graph: BoundedDegreeGraph, vertices: np.ndarray, meter: QueryMeter) -> np.ndarray:
    """Degrees of many vertices; one degree query each."""
    meter.record_degree(vertices.size)
    return graph.degree_array[vertices]


def neighbor_at_batch(
    graph: BoundedDegreeGraph,
    vertices: np.ndarray,
    slots: np.ndarray,
    meter: QueryMeter
) -> np.ndarray:
    """The slots[i]-th neighbor of vertices[i]; one neighbor query each.

    Callers guarantee slots[i] < degree(vertices[i]).
    """
    meter.record_neighbor(vertices.size)
    return graph.padded_adjacency[vertices, slots]


def neighbor_rows(graph: BoundedDegreeGraph, vertices: np.ndarray, meter: QueryMeter) -> np.ndarray:
    """Padded neighbor rows (-1 filled) for many vertices; one neighbor query each."""
    meter.record_neighbor(vertices.size)
    return graph.padded_adjacency[vertices]


def validate(graph: BoundedDegreeGraph) -> ValidationReport:
    """Check simplicity, the degree cap and symmetry by full scan.

    Returns:
        Report with ok=True, or the first violation found
    """

    def fail(kind: str, vertex: int, other=None, message: str = "") -> ValidationReport:
        violation = GraphViolation(kind=kind, vertex=vertex, other=other, message=message)
        logger.debug("Graph validation failed", kind=kind, vertex=vertex, other=other)
        return ValidationReport(ok=False, violation=violation)

    if len(graph.adjacency) != graph.n:
        return fail(
            ViolationKind.SIZE_MISMATCH, None,
            message=f"adjacency has {len(graph.adjacency)} rows for n={graph.n}"
        )

    neighbor_sets = []
    for v, nbrs in enumerate(graph.adjacency):
        seen = set()
        for u in nbrs:
            if not 0 <= u < graph.n:
                return fail(ViolationKind.VERTEX_RANGE, v, u, f"neighbor {u} of {v} is not a vertex")
            if u == v:
                return fail(ViolationKind.SELF_LOOP, v, v, f"self-loop at {v}")
            if u in seen:
                return fail(ViolationKind.DUPLICATE_EDGE, v, u, f"duplicate edge ({v}, {u})")
            seen.add(u)
        if len(nbrs) > graph.d:
            return fail(
                ViolationKind.DEGREE_CAP, v,
                message=f"vertex {v} has degree {len(nbrs)} > d={graph.d}"
            )
        neighbor_sets.append(seen)

    for v, seen in enumerate(neighbor_sets):
        for u in seen:
            if v not in neighbor_sets[u]:
                return fail(ViolationKind.ASYMMETRY, v, u, f"{u} is adjacent to {v} but not vice versa")

    return ValidationReport(ok=True)
