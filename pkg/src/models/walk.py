"""Walk and induced-path data models."""

from typing import List, Tuple

from pydantic import BaseModel, Field, model_validator


class Walk(BaseModel):
    """Raw lazy-walk trajectory: steps[0] is the start, len(steps) == length + 1."""

    start: int = Field(..., ge=0)
    steps: List[int] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_start(self):
        if self.steps[0] != self.start:
            raise ValueError(f"steps[0]={self.steps[0]} differs from start={self.start}")
        return self

    @property
    def length(self) -> int:
        return len(self.steps) - 1

    def vertices(self) -> List[int]:
        """Distinct visited vertices in order of first visit."""
        seen = dict.fromkeys(self.steps)
        return list(seen)

    def traversed_edges(self) -> List[Tuple[int, int]]:
        """Undirected edges crossed by non-lazy steps, each once, as (min, max)."""
        edges = {}
        for a, b in zip(self.steps, self.steps[1:]):
            if a != b:
                edges[(min(a, b), max(a, b))] = None
        return list(edges)


class InducedPath(BaseModel):
    """Loop-erased simple path from a walk's start to a target."""

    vertices: List[int] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_simple(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError(f"Induced path repeats a vertex: {self.vertices}")
        return self

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return list(zip(self.vertices, self.vertices[1:]))

    def contains_edge(self, u: int, v: int) -> bool:
        return any({a, b} == {u, v} for a, b in self.edges)

    def as_tuple(self) -> Tuple[int, ...]:
        return tuple(self.vertices)
