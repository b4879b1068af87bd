"""Tester parameter model."""

import math
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class ParamMode:
    """Constants for parameter schedules."""
    PAPER = "paper"
    DESK = "desk"
    # older spelling of PAPER
    THEORY = "theory"
    ALL = [PAPER, DESK]
    CHOICES = [DESK, PAPER, THEORY]

    @classmethod
    def canonical(cls, mode: str) -> str:
        """PAPER for either spelling of the asymptotic schedule, otherwise mode unchanged."""
        return cls.PAPER if mode == cls.THEORY else mode


def log2_at_least_one(x: float) -> float:
    return math.log2(x) if x > 1 else 0.0


def alpha_lower_bound(eps: float, n: int, component_size: int) -> float:
    """Smallest admissible reach threshold: eps / (sqrt(|S| n) log2 n)."""
    log_n = log2_at_least_one(n)
    if log_n == 0.0:
        return 0.0
    return eps / (math.sqrt(component_size * n) * log_n)


class TesterParams(BaseModel):
    """All tunable constants of Cycle Finder and the Cycle-freeness Tester."""

    eps: float = Field(..., gt=0.0, lt=1.0, description="Distance parameter")
    ell: int = Field(..., ge=1, description="Walk length")
    m: int = Field(..., ge=1, description="Walks per start vertex")
    num_starts: int = Field(..., ge=1, description="Sampled start vertices")
    c: float = Field(default=1.0, ge=1.0, description="Global constant multiplier")
    mode: str = Field(default=ParamMode.DESK, description="paper or desk")
    alpha: Optional[float] = Field(default=None, gt=0.0, lt=1.0, description="Reach threshold (diagnostics)")
    component_size: Optional[int] = Field(default=None, ge=1, description="|S| for the alpha range check")
    n: Optional[int] = Field(default=None, ge=1, description="Vertex count the schedule was built for")
    certificate_cap: Optional[int] = Field(default=None, ge=3, description="Certificate length cap (default 4*ell)")

    @field_validator("mode", mode="before")
    @classmethod
    def normalize_mode(cls, v):
        return ParamMode.canonical(v)

    @model_validator(mode="after")
    def validate_schedule(self):
        if self.mode not in ParamMode.ALL:
            raise ValueError(f"Unknown parameter mode: {self.mode}")
        if self.alpha is not None and self.component_size is not None and self.n is not None:
            lower = alpha_lower_bound(self.eps, self.n, self.component_size)
            if not lower < self.alpha:
                raise ValueError(f"alpha={self.alpha} must exceed {lower:.3g} for |S|={self.component_size}")
        if self.certificate_cap is None:
            self.certificate_cap = max(3, 4 * self.ell)
        return self

    def explored_edge_bound(self, d: int) -> int:
        """Bound d*m*ell on the edges of the explored subgraph."""
        return d * self.m * self.ell

    def query_bound(self, visited: int) -> int:
        """Per-start oracle query bound m*ell*2 + |visited|."""
        return self.m * self.ell * 2 + visited
