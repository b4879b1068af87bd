"""Data models for the reach, classification and cycle-event oracles."""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from src.models.walk import Walk


class EstimationMethod:
    """Constants for how reach probabilities were obtained."""
    EXACT = "exact"
    MONTE_CARLO = "monte-carlo"


class CheckStatus:
    """Constants for property-check outcomes."""
    OK = "ok"
    VIOLATION = "violation"
    INCONCLUSIVE = "inconclusive"


class StrengthLabel:
    """Constants for per-vertex Cycle Finder strength."""
    STRONG = "strong"
    WEAK = "weak"
    UNCERTAIN = "uncertain"


class ReachProfile(BaseModel):
    """Reach probabilities q_v of length-ell lazy walks from one start.

    q_light and q_heavy are only filled for Monte Carlo profiles computed with
    heavy_samples > 0; they split the same sample, so q_light + q_heavy == q.
    """

    start: int = Field(..., ge=0)
    ell: int = Field(..., ge=0)
    method: str = Field(..., description="exact or monte-carlo")
    q: List[float] = Field(..., description="Reach probability per vertex")
    samples: Optional[int] = Field(default=None, ge=1, description="Walks sampled (monte-carlo)")
    reach_counts: Optional[List[int]] = Field(default=None, description="Walks reaching each vertex")
    heavy_counts: Optional[List[int]] = Field(default=None, description="Heavy walks reaching each vertex")
    heavy_samples: int = Field(default=0, ge=0, description="Partner walks per cyc estimate")
    uncertain_heavy_walks: int = Field(default=0, ge=0, description="Walks whose heavy label was borderline")

    @model_validator(mode="after")
    def check_profile(self):
        if self.method not in (EstimationMethod.EXACT, EstimationMethod.MONTE_CARLO):
            raise ValueError(f"Unknown estimation method: {self.method}")
        if any(not 0.0 <= p <= 1.0 for p in self.q):
            raise ValueError("Reach probabilities must lie in [0, 1]")
        if self.method == EstimationMethod.MONTE_CARLO and (self.samples is None or self.reach_counts is None):
            raise ValueError("Monte Carlo profiles need samples and reach_counts")
        return self

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def q_heavy(self) -> Optional[List[float]]:
        if self.heavy_counts is None:
            return None
        return [count / self.samples for count in self.heavy_counts]

    @property
    def q_light(self) -> Optional[List[float]]:
        if self.heavy_counts is None:
            return None
        return [(reach - heavy) / self.samples for reach, heavy in zip(self.reach_counts, self.heavy_counts)]


class VertexLabel(BaseModel):
    """Isolation and blue labels of one vertex; None means the estimate is borderline."""
    vertex: int
    reach: int = Field(..., ge=0, description="Walks reaching the vertex")
    q: float
    dominant_path: Optional[List[int]] = Field(default=None, description="Most frequent induced path")
    dominant_share: float = Field(default=0.0, description="Share of reaching walks on the dominant path")
    isolated: Optional[bool] = None
    blue: Optional[bool] = None


class DirectedEdgeLabel(BaseModel):
    """Dominance label of <tail, head>."""
    tail: int
    head: int
    avoid_probability: float = Field(..., description="Probability of reaching head not via (tail, head)")
    dominant: Optional[bool] = None


class EdgeClassification(BaseModel):
    """Labels for every vertex of S and every directed edge with both ends in S."""

    start: int
    alpha: float = Field(..., gt=0.0, lt=1.0)
    ell: int
    samples: int
    confidence: float
    component: List[int] = Field(..., description="Vertex set S, sorted")
    special: Optional[bool] = Field(default=None, description="q_v > alpha for all v in S")
    vertices: Dict[int, VertexLabel] = Field(default_factory=dict)
    edges: List[DirectedEdgeLabel] = Field(default_factory=list)

    def label(self, tail: int, head: int) -> Optional[DirectedEdgeLabel]:
        for edge in self.edges:
            if edge.tail == tail and edge.head == head:
                return edge
        return None

    def dominant_edges(self) -> List[Tuple[int, int]]:
        """Directed edges labeled dominant with certainty."""
        return [(e.tail, e.head) for e in self.edges if e.dominant is True]

    def uncertain_edges(self) -> List[Tuple[int, int]]:
        return [(e.tail, e.head) for e in self.edges if e.dominant is None]

    def undirected_edges(self) -> List[Tuple[int, int]]:
        return sorted({(min(e.tail, e.head), max(e.tail, e.head)) for e in self.edges})

    def recessive_edges(self) -> List[Tuple[int, int]]:
        """Undirected edges certainly dominant in neither direction."""
        recessive = []
        for u, v in self.undirected_edges():
            forward, backward = self.label(u, v), self.label(v, u)
            if forward.dominant is False and backward.dominant is False:
                recessive.append((u, v))
        return recessive

    def blue_vertices(self) -> List[int]:
        return [v for v, label in sorted(self.vertices.items()) if label.blue is True]

    @property
    def conclusive(self) -> bool:
        return self.special is True and not self.uncertain_edges()


class CheckResult(BaseModel):
    """Outcome of a property check; violations carry the offending structure."""
    status: str
    kind: Optional[str] = Field(default=None, description="indegree, cycle, bidirectional, path-miss or premise")
    edges: List[Tuple[int, int]] = Field(default_factory=list)
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == CheckStatus.OK


class WalkStats(BaseModel):
    """cyc estimate of one walk: how often an independent walk closes a cycle with it."""
    walk: Walk
    samples: int = Field(..., ge=1)
    hits: int = Field(..., ge=0)
    cyc: float
    ci_low: float
    ci_high: float
    threshold: float = Field(..., description="1/sqrt(n)")
    heavy: Optional[bool] = None


class RecessiveReport(BaseModel):
    """Certain-recessive edge count against the circuit rank of G_S."""
    start: int
    alpha: float
    component_size: int
    component_edges: int
    certain_recessive: int
    uncertain_edges: int
    circuit_rank: int
    bound_holds: Optional[bool] = None


class PairDetectionEstimate(BaseModel):
    """Probability that two independent walks from s form a cycle."""
    start: int
    pairs: int
    hits: int
    rate: float
    ci_low: float
    ci_high: float


class StrongVertexEstimate(BaseModel):
    """Cycle Finder rejection rate from one start vertex."""
    vertex: int
    trials: int
    rejections: int
    rate: float
    ci_low: float
    ci_high: float
    label: str


class BlueSummary(BaseModel):
    """Blue vertex count against the eps*|S|/2 threshold."""
    blue: int
    uncertain: int
    threshold: float
    exceeds: Optional[bool] = None
