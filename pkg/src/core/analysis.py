"""Reach, dominance and cycle-event oracles for small instances.

Everything here reads the graph directly (no QueryMeter): these are
verification tools run next to the tester, not part of it. Threshold
comparisons on sampled quantities are three-valued; a label whose Wilson
interval straddles its threshold is None and keeps property checks
inconclusive instead of failing them.
"""

import math
from collections import Counter, defaultdict
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.core.errors import InvalidArgumentError, ResourceLimitError
from src.core.tester import cycle_finder
from src.core.walks import (
    DEFAULT_EXACT_BUDGET,
    first_visit_paths,
    reach_probabilities_exact,
    sample_walks,
)
from src.models.analysis import (
    BlueSummary,
    CheckResult,
    CheckStatus,
    DirectedEdgeLabel,
    EdgeClassification,
    EstimationMethod,
    PairDetectionEstimate,
    ReachProfile,
    RecessiveReport,
    StrengthLabel,
    StrongVertexEstimate,
    VertexLabel,
    WalkStats,
)
from src.models.graph import BoundedDegreeGraph, QueryMeter
from src.models.params import TesterParams
from src.models.walk import InducedPath, Walk
from src.utils.logger import get_logger
from src.utils.rng import make_rng, spawn
from src.utils.stats import compare_to_threshold, required_samples, wilson_interval

logger = get_logger(__name__)

Footprint = Tuple[FrozenSet[int], FrozenSet[Tuple[int, int]]]

STRONG_THRESHOLD = 2.0 / 3.0


def _all_of(*values: Optional[bool]) -> Optional[bool]:
    """Three-valued AND: False wins over None, None wins over True."""
    if any(v is False for v in values):
        return False
    if any(v is None for v in values):
        return None
    return True


def _below(successes: int, trials: int, threshold: float, confidence: float) -> Optional[bool]:
    above = compare_to_threshold(successes, trials, threshold, confidence)
    return None if above is None else not above


def walk_footprint(steps: Sequence[int]) -> Footprint:
    """Visited vertices and traversed undirected edges of a trajectory."""
    steps = [int(v) for v in steps]
    edges = frozenset(
        (min(a, b), max(a, b)) for a, b in zip(steps, steps[1:]) if a != b
    )
    return frozenset(steps), edges


def closes_cycle(graph: BoundedDegreeGraph, first: Footprint, second: Footprint) -> bool:
    """Whether two walks form a cycle.

    The union of both walks' traversed edges and every graph edge joining a
    vertex of one walk to a vertex of the other is checked for a cycle.
    """
    first_vertices, first_edges = first
    second_vertices, second_edges = second
    edges = set(first_edges) | set(second_edges)
    for a in first_vertices:
        for b in graph.adjacency[a]:
            if b in second_vertices:
                edges.add((min(a, b), max(a, b)))

    components = nx.utils.UnionFind()
    for u, v in edges:
        if components[u] == components[v]:
            return True
        components.union(u, v)
    return False


def _cycle_hits(graph: BoundedDegreeGraph, footprint: Footprint, partners: Counter) -> int:
    return sum(count for partner, count in partners.items() if closes_cycle(graph, footprint, partner))


class _WalkTally:
    """Per-vertex counts of one Monte Carlo sample of walks."""

    def __init__(self, n: int, samples: int) -> None:
        self.samples = samples
        self.reach = np.zeros(n, dtype=np.int64)
        self.paths: Dict[int, Counter] = defaultdict(Counter)
        self.arrivals: Dict[int, Counter] = defaultdict(Counter)
        self.reached: List[List[int]] = []

    def add(self, steps: Sequence[int]) -> None:
        first = first_visit_paths(steps)
        for v, (path, predecessor) in first.items():
            self.reach[v] += 1
            self.paths[v][path] += 1
            self.arrivals[v][predecessor] += 1
        self.reached.append(list(first))

    def dominant_path(self, v: int) -> Tuple[Optional[Tuple[int, ...]], int]:
        """Most frequent induced path to v and its count (ties go to the smallest path)."""
        if not self.paths[v]:
            return None, 0
        path, count = min(self.paths[v].items(), key=lambda item: (-item[1], item[0]))
        return path, count


def _sample_profile(
    graph: BoundedDegreeGraph,
    s: int,
    ell: int,
    samples: int,
    rng: np.random.Generator,
    confidence: float,
    heavy_samples: int
) -> Tuple[ReachProfile, _WalkTally]:
    meter = QueryMeter()
    trajectories = sample_walks(graph, s, ell, samples, rng, meter)
    tally = _WalkTally(graph.n, samples)
    for row in trajectories.tolist():
        tally.add(row)

    heavy_counts = None
    uncertain = 0
    if heavy_samples > 0:
        partners = Counter(
            walk_footprint(row) for row in sample_walks(graph, s, ell, heavy_samples, rng, meter).tolist()
        )
        threshold = 1.0 / math.sqrt(graph.n)
        heavy_by_footprint: Dict[Footprint, Optional[bool]] = {}
        counts = np.zeros(graph.n, dtype=np.int64)
        for row, reached in zip(trajectories.tolist(), tally.reached):
            footprint = walk_footprint(row)
            if footprint not in heavy_by_footprint:
                hits = _cycle_hits(graph, footprint, partners)
                heavy_by_footprint[footprint] = compare_to_threshold(hits, heavy_samples, threshold, confidence)
            heavy = heavy_by_footprint[footprint]
            if heavy is True:
                counts[reached] += 1
            elif heavy is None:
                uncertain += 1
        heavy_counts = counts.tolist()
        logger.debug(
            "Heavy/light split computed",
            footprints=len(heavy_by_footprint), partners=heavy_samples, uncertain=uncertain
        )

    profile = ReachProfile(
        start=s,
        ell=ell,
        method=EstimationMethod.MONTE_CARLO,
        q=(tally.reach / samples).tolist(),
        samples=samples,
        reach_counts=tally.reach.tolist(),
        heavy_counts=heavy_counts,
        heavy_samples=heavy_samples,
        uncertain_heavy_walks=uncertain,
    )
    return profile, tally


def reach_profile(
    graph: BoundedDegreeGraph,
    s: int,
    ell: int,
    method: str = EstimationMethod.EXACT,
    samples: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    confidence: float = 0.999,
    heavy_samples: int = 0,
    budget: int = DEFAULT_EXACT_BUDGET
) -> ReachProfile:
    """q_v for every vertex, by exact DP or from `samples` sampled walks.

    The light/heavy split is only available for Monte Carlo profiles with
    heavy_samples > 0: each distinct walk footprint gets a cyc estimate
    against one shared pool of heavy_samples partner walks; walks with a
    borderline estimate count as light.

    Raises:
        ResourceLimitError: If the exact DP exceeds the budget
    """
    if not 0 <= s < graph.n:
        raise InvalidArgumentError(f"Vertex {s} is outside 0..{graph.n - 1}")
    if method == EstimationMethod.EXACT:
        q = reach_probabilities_exact(graph, s, ell, budget=budget)
        return ReachProfile(start=s, ell=ell, method=method, q=q.tolist())
    if method != EstimationMethod.MONTE_CARLO:
        raise InvalidArgumentError(f"Unknown estimation method: {method}")
    if not samples or samples < 1:
        raise InvalidArgumentError("Monte Carlo reach profile needs samples >= 1")
    profile, _ = _sample_profile(graph, s, ell, samples, make_rng(rng), confidence, heavy_samples)
    return profile


def check_special_vertex(
    profile: ReachProfile,
    component: Iterable[int],
    alpha: float,
    confidence: float = 0.999
) -> CheckResult:
    """Whether q_v > alpha holds for every v in the component."""
    failing, borderline = [], []
    for v in component:
        if profile.method == EstimationMethod.EXACT:
            above = profile.q[v] > alpha
        else:
            above = compare_to_threshold(profile.reach_counts[v], profile.samples, alpha, confidence)
        if above is False:
            failing.append(v)
        elif above is None:
            borderline.append(v)

    if failing:
        return CheckResult(
            status=CheckStatus.VIOLATION, kind="premise",
            message=f"q_v <= alpha={alpha} at vertices {failing}"
        )
    if borderline:
        return CheckResult(
            status=CheckStatus.INCONCLUSIVE, kind="premise",
            message=f"q_v too close to alpha={alpha} at vertices {borderline}"
        )
    return CheckResult(status=CheckStatus.OK)


def classify_edges(
    graph: BoundedDegreeGraph,
    s: int,
    alpha: float,
    ell: int,
    samples: int,
    rng: Optional[np.random.Generator] = None,
    confidence: float = 0.999,
    component: Optional[Iterable[int]] = None,
    heavy_samples: int = 0
) -> EdgeClassification:
    """Isolated, dominant, recessive and blue labels from `samples` walks from s.

    S defaults to the vertices whose q_v is certainly above alpha. Only
    directed edges with both endpoints in S are labeled.

    Raises:
        ResourceLimitError: If samples is below the count the confidence level needs
    """
    if not 0 < alpha < 1:
        raise InvalidArgumentError(f"Need 0 < alpha < 1, got {alpha}")
    needed = required_samples(alpha, confidence)
    if samples < needed:
        raise ResourceLimitError(
            f"Classification at alpha={alpha}, confidence={confidence} needs {needed} walks, got {samples}",
            required=needed
        )

    profile, tally = _sample_profile(graph, s, ell, samples, make_rng(rng), confidence, heavy_samples)

    if component is None:
        members = [
            v for v in range(graph.n)
            if compare_to_threshold(int(tally.reach[v]), samples, alpha, confidence) is True
        ]
    else:
        members = sorted(set(int(v) for v in component))
        if any(not 0 <= v < graph.n for v in members):
            raise InvalidArgumentError(f"Component has vertices outside 0..{graph.n - 1}")
    in_component = set(members)
    premise = check_special_vertex(profile, members, alpha, confidence)
    special = {CheckStatus.OK: True, CheckStatus.VIOLATION: False}.get(premise.status)

    labels: Dict[int, VertexLabel] = {}
    heavy = profile.heavy_counts
    for v in members:
        reach = int(tally.reach[v])
        path, count = tally.dominant_path(v)
        share_above_half = compare_to_threshold(count, reach, 0.5, confidence)
        other_below = _below(reach - count, samples, alpha / 2.0, confidence)
        blue = None
        if heavy is not None:
            blue = compare_to_threshold(heavy[v], samples, alpha / 4.0, confidence)
        labels[v] = VertexLabel(
            vertex=v,
            reach=reach,
            q=reach / samples,
            dominant_path=list(path) if path else None,
            dominant_share=count / reach if reach else 0.0,
            isolated=_all_of(share_above_half, other_below),
            blue=blue,
        )

    edges = []
    for u in members:
        for v in graph.adjacency[u]:
            if v not in in_component:
                continue
            avoid = int(tally.reach[v]) - tally.arrivals[v][u]
            edges.append(DirectedEdgeLabel(
                tail=u,
                head=v,
                avoid_probability=avoid / samples,
                dominant=_all_of(labels[v].isolated, _below(avoid, samples, alpha / 2.0, confidence)),
            ))

    classification = EdgeClassification(
        start=s, alpha=alpha, ell=ell, samples=samples, confidence=confidence,
        component=members, special=special, vertices=labels, edges=edges,
    )
    logger.info(
        "Edges classified",
        start=s,
        component=len(members),
        dominant=len(classification.dominant_edges()),
        recessive=len(classification.recessive_edges()),
        uncertain=len(classification.uncertain_edges()),
        special=special,
    )
    return classification


def _inconclusive(cls: EdgeClassification) -> Optional[CheckResult]:
    if cls.special is not True:
        return CheckResult(
            status=CheckStatus.INCONCLUSIVE, kind="premise",
            message="special-vertex premise not established for S"
        )
    uncertain = cls.uncertain_edges()
    if uncertain:
        return CheckResult(
            status=CheckStatus.INCONCLUSIVE, edges=uncertain,
            message=f"{len(uncertain)} directed edges have borderline dominance"
        )
    return None


def check_dominant_forest(cls: EdgeClassification) -> CheckResult:
    """Dominant edges must have in-degree <= 1 everywhere and no undirected cycle."""
    pending = _inconclusive(cls)
    if pending:
        return pending

    dominant = cls.dominant_edges()
    into: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for u, v in dominant:
        into[v].append((u, v))
    for v in sorted(into):
        if len(into[v]) >= 2:
            return CheckResult(
                status=CheckStatus.VIOLATION, kind="indegree", edges=into[v],
                message=f"vertex {v} has {len(into[v])} dominant in-edges"
            )

    undirected = nx.Graph()
    undirected.add_edges_from(dominant)
    try:
        cycle = nx.find_cycle(undirected)
    except nx.NetworkXNoCycle:
        return CheckResult(status=CheckStatus.OK)
    return CheckResult(
        status=CheckStatus.VIOLATION, kind="cycle", edges=[(u, v) for u, v in cycle],
        message="dominant edges contain a cycle"
    )


def check_no_bidirectional_dominance(cls: EdgeClassification) -> CheckResult:
    pending = _inconclusive(cls)
    if pending:
        return pending
    dominant = set(cls.dominant_edges())
    for u, v in sorted(dominant):
        if u < v and (v, u) in dominant:
            return CheckResult(
                status=CheckStatus.VIOLATION, kind="bidirectional", edges=[(u, v), (v, u)],
                message=f"both <{u},{v}> and <{v},{u}> are dominant"
            )
    return CheckResult(status=CheckStatus.OK)


def check_dominant_path_through_edge(cls: EdgeClassification) -> CheckResult:
    """For every dominant <u,v> the dominant path to v must use edge (u,v)."""
    pending = _inconclusive(cls)
    if pending:
        return pending
    for u, v in cls.dominant_edges():
        path = cls.vertices[v].dominant_path
        if path is None or not InducedPath(vertices=path).contains_edge(u, v):
            return CheckResult(
                status=CheckStatus.VIOLATION, kind="path-miss", edges=[(u, v)],
                message=f"dominant path {path} to {v} misses edge ({u}, {v})"
            )
    return CheckResult(status=CheckStatus.OK)


def estimate_cyc(
    graph: BoundedDegreeGraph,
    walk: Walk,
    ell: int,
    samples: int,
    rng: Optional[np.random.Generator] = None,
    confidence: float = 0.95
) -> WalkStats:
    """Fraction of `samples` independent walks from walk.start that close a cycle with walk."""
    if samples < 1:
        raise InvalidArgumentError(f"Need samples >= 1, got {samples}")
    partners = Counter(
        walk_footprint(row)
        for row in sample_walks(graph, walk.start, ell, samples, make_rng(rng), QueryMeter()).tolist()
    )
    hits = _cycle_hits(graph, walk_footprint(walk.steps), partners)
    low, high = wilson_interval(hits, samples, confidence)
    threshold = 1.0 / math.sqrt(graph.n)
    return WalkStats(
        walk=walk,
        samples=samples,
        hits=hits,
        cyc=hits / samples,
        ci_low=low,
        ci_high=high,
        threshold=threshold,
        heavy=compare_to_threshold(hits, samples, threshold, confidence),
    )


def _circuit_rank(vertices: Iterable[int], edges: Iterable[Tuple[int, int]]) -> int:
    induced = nx.Graph()
    induced.add_nodes_from(vertices)
    induced.add_edges_from(edges)
    return induced.number_of_edges() - induced.number_of_nodes() + nx.number_connected_components(induced)


def count_recessive_vs_bound(
    graph: BoundedDegreeGraph,
    s: int,
    alpha: float,
    ell: int,
    samples: int,
    rng: Optional[np.random.Generator] = None,
    confidence: float = 0.999,
    component: Optional[Iterable[int]] = None
) -> RecessiveReport:
    """Classify from s, then compare certain-recessive edges with rank(G_S)."""
    return recessive_report(classify_edges(graph, s, alpha, ell, samples, rng, confidence, component))


def recessive_report(cls: EdgeClassification) -> RecessiveReport:
    """Certain-recessive edges of G_S against the circuit rank of G_S.

    When dominant edges form a forest, at least rank(G_S) edges are recessive.
    """
    undirected = cls.undirected_edges()
    certain = len(cls.recessive_edges())

    uncertain = 0
    for u, v in undirected:
        directions = (cls.label(u, v).dominant, cls.label(v, u).dominant)
        if True not in directions and None in directions:
            uncertain += 1

    rank = _circuit_rank(cls.component, undirected)
    if certain >= rank:
        holds = True
    elif certain + uncertain < rank:
        holds = False
    else:
        holds = None
    return RecessiveReport(
        start=cls.start,
        alpha=cls.alpha,
        component_size=len(cls.component),
        component_edges=len(undirected),
        certain_recessive=certain,
        uncertain_edges=uncertain,
        circuit_rank=rank,
        bound_holds=holds,
    )


def blue_summary(cls: EdgeClassification, eps: float) -> BlueSummary:
    """Blue vertices of S against eps*|S|/2."""
    blue = sum(1 for label in cls.vertices.values() if label.blue is True)
    uncertain = sum(1 for label in cls.vertices.values() if label.blue is None)
    threshold = eps * len(cls.component) / 2.0
    if blue > threshold:
        exceeds = True
    elif blue + uncertain <= threshold:
        exceeds = False
    else:
        exceeds = None
    return BlueSummary(blue=blue, uncertain=uncertain, threshold=threshold, exceeds=exceeds)


def estimate_pair_detection(
    graph: BoundedDegreeGraph,
    s: int,
    ell: int,
    pairs: int,
    rng: Optional[np.random.Generator] = None,
    confidence: float = 0.95
) -> PairDetectionEstimate:
    """Probability that two independent length-ell walks from s form a cycle."""
    if pairs < 1:
        raise InvalidArgumentError(f"Need pairs >= 1, got {pairs}")
    trajectories = sample_walks(graph, s, ell, 2 * pairs, make_rng(rng), QueryMeter()).tolist()
    hits = sum(
        closes_cycle(graph, walk_footprint(trajectories[2 * i]), walk_footprint(trajectories[2 * i + 1]))
        for i in range(pairs)
    )
    low, high = wilson_interval(hits, pairs, confidence)
    return PairDetectionEstimate(start=s, pairs=pairs, hits=hits, rate=hits / pairs, ci_low=low, ci_high=high)


def estimate_strong_vertices(
    graph: BoundedDegreeGraph,
    params: TesterParams,
    trials: int,
    seed: int,
    vertices: Optional[Iterable[int]] = None,
    confidence: float = 0.95
) -> List[StrongVertexEstimate]:
    """Cycle Finder rejection rate per start vertex; strong means rate >= 2/3."""
    if trials < 1:
        raise InvalidArgumentError(f"Need trials >= 1, got {trials}")
    rng = make_rng(seed)
    targets = range(graph.n) if vertices is None else vertices
    estimates = []
    for v in targets:
        rejections = sum(
            cycle_finder(graph, int(v), params, stream, QueryMeter()).rejected
            for stream in spawn(rng, trials)
        )
        low, high = wilson_interval(rejections, trials, confidence)
        if low >= STRONG_THRESHOLD:
            label = StrengthLabel.STRONG
        elif high < STRONG_THRESHOLD:
            label = StrengthLabel.WEAK
        else:
            label = StrengthLabel.UNCERTAIN
        estimates.append(StrongVertexEstimate(
            vertex=int(v), trials=trials, rejections=rejections, rate=rejections / trials,
            ci_low=low, ci_high=high, label=label,
        ))
    logger.info(
        "Strong vertices estimated",
        vertices=len(estimates),
        strong=sum(e.label == StrengthLabel.STRONG for e in estimates),
    )
    return estimates
