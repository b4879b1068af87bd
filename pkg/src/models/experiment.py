"""Instance and experiment data models."""

import hashlib
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.graph import BoundedDegreeGraph
from src.models.params import ParamMode


class InstanceFamily:
    """Constants for generated instance families."""
    FOREST = "uniform-forest"
    DISJOINT_CYCLES = "disjoint-cycles"
    PLANTED = "forest-plus-planted-cycles"
    WELL_CONNECTED = "well-connected-cyclic"

    ALL = (FOREST, DISJOINT_CYCLES, PLANTED, WELL_CONNECTED)


class InstanceSpec(BaseModel):
    """Everything needed to regenerate one instance."""

    family: str = Field(..., description="One of InstanceFamily.ALL")
    n: int = Field(..., ge=1, description="Vertex count")
    d: int = Field(..., ge=1, description="Degree bound")
    seed: int = Field(default=0, ge=0, description="Generator seed")
    eps: Optional[float] = Field(default=None, gt=0.0, lt=1.0, description="Disjoint cycles have length 1/eps")
    planted: int = Field(default=0, ge=0, description="Planted cycle count")
    regularity: Optional[int] = Field(default=None, ge=2, description="Degree of well-connected instances")

    @field_validator("family")
    @classmethod
    def check_family(cls, value: str) -> str:
        if value not in InstanceFamily.ALL:
            raise ValueError(f"Unknown family {value!r}, expected one of {', '.join(InstanceFamily.ALL)}")
        return value

    @model_validator(mode="after")
    def check_family_params(self):
        if self.family == InstanceFamily.DISJOINT_CYCLES and self.eps is None:
            raise ValueError("disjoint-cycles needs eps")
        return self


class GeneratedInstance(BaseModel):
    """A generated graph with its ground truth."""

    spec: InstanceSpec
    graph: BoundedDegreeGraph
    distance: int = Field(..., ge=0, description="Exact distance to cycle-freeness (circuit rank)")
    eps_far: Dict[str, bool] = Field(default_factory=dict, description="eps -> is eps-far")

    def metadata(self) -> Dict[str, Any]:
        """Sidecar record written next to the graph file."""
        return {
            "family": self.spec.family,
            "n": self.spec.n,
            "d": self.spec.d,
            "seed": self.spec.seed,
            "eps": self.spec.eps,
            "planted": self.spec.planted,
            "regularity": self.spec.regularity,
            "edges": self.graph.edge_count,
            "distance": self.distance,
            "cycle_free": self.distance == 0,
            "eps_far": self.eps_far,
        }


class ExperimentCell(BaseModel):
    """One point of the parameter grid."""
    index: int
    family: str
    n: int
    d: int
    eps: float
    planted: int = 0


class ExperimentSpec(BaseModel):
    """Parameter grid, tester schedule and trial count of a sweep.

    Trial i of every cell uses seed seed_base + i for its instance and a
    derived stream for the tester.
    """

    family: str = Field(..., description="Instance family")
    n_values: List[int] = Field(..., min_length=1)
    d_values: List[int] = Field(default_factory=lambda: [3], min_length=1)
    eps_values: List[float] = Field(default_factory=lambda: [0.1], min_length=1)
    planted_values: List[int] = Field(default_factory=lambda: [0], min_length=1)
    trials: int = Field(default=10, ge=1)
    seed_base: int = Field(default=0, ge=0)
    mode: str = Field(default=ParamMode.DESK)
    beta_ell: float = Field(default=4.0, gt=0)
    beta_walks: float = Field(default=2.0, gt=0)
    c: float = Field(default=1.0, ge=1.0)
    cap_factor: int = Field(default=4, ge=1)
    ell: Optional[int] = Field(default=None, ge=1, description="Override of the schedule's ell")
    m: Optional[int] = Field(default=None, ge=1, description="Override of the schedule's m")
    num_starts: Optional[int] = Field(default=None, ge=1, description="Override of the schedule's num_starts")
    record_timing: bool = Field(default=False, description="Add wall times to trial rows")

    @field_validator("mode", mode="before")
    @classmethod
    def normalize_mode(cls, v):
        return ParamMode.canonical(v)

    @model_validator(mode="after")
    def check_grid(self):
        if self.family not in InstanceFamily.ALL:
            raise ValueError(f"Unknown family {self.family!r}")
        if self.mode not in ParamMode.ALL:
            raise ValueError(f"Unknown parameter mode: {self.mode}")
        if any(n < 1 for n in self.n_values) or any(d < 1 for d in self.d_values):
            raise ValueError("n and d values must be >= 1")
        if any(not 0 < e < 1 for e in self.eps_values):
            raise ValueError("eps values must lie in (0, 1)")
        if any(k < 0 for k in self.planted_values):
            raise ValueError("planted counts must be >= 0")
        if self.family == InstanceFamily.DISJOINT_CYCLES:
            for eps in self.eps_values:
                length = round(1.0 / eps)
                if abs(1.0 / eps - length) > 1e-9 or length < 3:
                    raise ValueError(f"disjoint cycles need 1/eps to be an integer >= 3, got 1/{eps}")
                too_small = [n for n in self.n_values if n < length]
                if too_small:
                    raise ValueError(f"n values {too_small} hold no cycle of length {length} (eps={eps})")
        return self

    def cells(self) -> List[ExperimentCell]:
        """Grid cells in a fixed order: n, then d, then eps, then planted.

        Disjoint-cycles cells round n down to a multiple of the cycle length 1/eps.
        """
        cells = []
        for n in self.n_values:
            for d in self.d_values:
                for eps in self.eps_values:
                    cell_n = n
                    if self.family == InstanceFamily.DISJOINT_CYCLES:
                        length = round(1.0 / eps)
                        cell_n = n - n % length
                    for planted in self.planted_values:
                        cells.append(ExperimentCell(
                            index=len(cells), family=self.family, n=cell_n, d=d, eps=eps, planted=planted
                        ))
        return cells

    def spec_hash(self) -> str:
        """Stable identifier used to key checkpoints."""
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()[:16]


class TrialRow(BaseModel):
    """One tester run on one generated instance."""
    cell: int
    trial: int
    seed: int
    n: int
    outcome: str
    certificate_length: Optional[int] = None
    certificate_valid: Optional[bool] = None
    neighbor_queries: int = 0
    degree_queries: int = 0
    total_queries: int = 0
    distance: int = 0
    eps_far: bool = False
    certificate: Optional[List[int]] = None
    wall_time_s: Optional[float] = None


class CellSummary(BaseModel):
    """Aggregates of one grid cell."""
    cell: int
    family: str
    n: int
    d: int
    eps: float
    planted: int
    trials: int
    rejections: int
    rejection_rate: float
    ci_low: float
    ci_high: float
    mean_queries: float
    max_queries: int
    mean_certificate_length: Optional[float] = None

    @model_validator(mode="after")
    def check_counts(self):
        if self.rejections > self.trials:
            raise ValueError(f"rejections={self.rejections} exceeds trials={self.trials}")
        return self


class RunReport(BaseModel):
    """Per-cell aggregates plus the raw per-trial rows of a sweep."""
    spec: ExperimentSpec
    summaries: List[CellSummary] = Field(default_factory=list)
    rows: List[TrialRow] = Field(default_factory=list)


class ScalingFit(BaseModel):
    """Least-squares exponents of query growth in n."""
    raw_exponent: float
    corrected_exponent: float
    n_values: List[int]
    mean_queries: List[float]
