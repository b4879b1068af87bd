"""Tester outcome models: explored subgraph, certificate and verdict."""

from typing import List, Optional, Set, Tuple

from pydantic import BaseModel, Field, model_validator

from src.models.graph import QueryMeter


class Outcome:
    """Constants for tester outcomes."""
    ACCEPT = "ACCEPT"
    REJECT = "REJECT"


class ExploredSubgraph(BaseModel):
    """Subgraph G' induced on the vertices visited by the walks."""

    vertices: Set[int] = Field(default_factory=set)
    edges: List[Tuple[int, int]] = Field(default_factory=list, description="Undirected (u, v), u < v")

    @model_validator(mode="after")
    def check_endpoints(self):
        for u, v in self.edges:
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"Edge ({u}, {v}) has an endpoint outside the explored vertices")
        return self


class CycleCertificate(BaseModel):
    """Cycle v_0, ..., v_{k-1} (closed by the edge v_{k-1} v_0).

    No structural checks here: verify_certificate decides validity.
    """

    cycle: List[int] = Field(..., description="Cycle vertices without repeating v_0")

    @property
    def length(self) -> int:
        return len(self.cycle)

    def closed(self) -> List[int]:
        return self.cycle + self.cycle[:1]

    def edges(self) -> List[Tuple[int, int]]:
        closed = self.closed()
        return list(zip(closed, closed[1:]))


class StartDiagnostics(BaseModel):
    """What one Cycle Finder run from a start vertex saw."""
    start: int
    outcome: str
    visited: int = 0
    explored_edges: int = 0
    neighbor_queries: int = 0
    degree_queries: int = 0
    certificate_length: Optional[int] = None


class TestVerdict(BaseModel):
    """Result of Cycle Finder or the Cycle-freeness Tester."""

    __test__ = False  # not a pytest class

    outcome: str
    certificate: Optional[CycleCertificate] = None
    meter: QueryMeter = Field(default_factory=QueryMeter)
    verification_meter: QueryMeter = Field(default_factory=QueryMeter)
    starts: List[StartDiagnostics] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_certificate(self):
        if self.outcome not in (Outcome.ACCEPT, Outcome.REJECT):
            raise ValueError(f"Invalid outcome: {self.outcome}")
        if (self.outcome == Outcome.REJECT) != (self.certificate is not None):
            raise ValueError("REJECT must carry a certificate and ACCEPT must not")
        return self

    @property
    def rejected(self) -> bool:
        return self.outcome == Outcome.REJECT
