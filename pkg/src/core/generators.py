"""Instance generators with exact ground truth.

Every generator is a pure function of its arguments (seed included) and
returns a validated BoundedDegreeGraph.
"""

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from src.core.errors import InvalidArgumentError
from src.models.experiment import GeneratedInstance, InstanceFamily, InstanceSpec
from src.models.graph import BoundedDegreeGraph
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_NEW_TREE_PROBABILITY = 0.05


class FarLabel:
    """Constants for reference verdicts."""
    FAR = "far"
    NOT_FAR = "not-far"


def _forest_edges(
    n: int,
    d: int,
    rng: np.random.Generator,
    new_tree_probability: float
) -> List[Tuple[int, int]]:
    """Uniform attachment: each new vertex joins a random placed vertex with spare degree."""
    order = rng.permutation(n).tolist()
    degrees = [0] * n
    open_vertices: List[int] = []
    edges = []
    for v in order:
        if open_vertices and rng.random() >= new_tree_probability:
            slot = int(rng.integers(len(open_vertices)))
            parent = open_vertices[slot]
            edges.append((min(parent, v), max(parent, v)))
            degrees[parent] += 1
            degrees[v] += 1
            if degrees[parent] >= d:
                open_vertices[slot] = open_vertices[-1]
                open_vertices.pop()
        if degrees[v] < d:
            open_vertices.append(v)
    return edges


def gen_forest(
    n: int,
    d: int,
    seed: int,
    new_tree_probability: float = DEFAULT_NEW_TREE_PROBABILITY
) -> BoundedDegreeGraph:
    """Random forest under degree cap d.

    A new tree is started with probability new_tree_probability, or whenever
    no placed vertex has spare degree.
    """
    if n < 1 or d < 1:
        raise InvalidArgumentError(f"Need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    edges = _forest_edges(n, d, rng, new_tree_probability)
    logger.debug("Generated forest", n=n, d=d, edges=len(edges), seed=seed)
    return BoundedDegreeGraph.from_edges(n, d, edges)


def cycle_length_for(eps: float) -> int:
    """1/eps as an integer, or InvalidArgumentError if it is not one."""
    if not 0 < eps < 1:
        raise InvalidArgumentError(f"Need 0 < eps < 1, got {eps}")
    k = round(1.0 / eps)
    if abs(1.0 / eps - k) > 1e-9:
        raise InvalidArgumentError(f"1/eps must be an integer, got 1/{eps} = {1.0 / eps}")
    return int(k)


def gen_disjoint_cycles(eps: float, n: int, seed: int, d: int = 2) -> BoundedDegreeGraph:
    """eps*n vertex-disjoint cycles of length 1/eps on randomly labeled vertices.

    Raises:
        InvalidArgumentError: If 1/eps is not an integer >= 3 or does not divide n
    """
    k = cycle_length_for(eps)
    if k < 3:
        raise InvalidArgumentError(f"Cycle length 1/eps must be >= 3, got {k}")
    if n % k != 0:
        raise InvalidArgumentError(f"n={n} is not divisible by the cycle length {k}")
    if d < 2:
        raise InvalidArgumentError(f"Cycles need degree bound d >= 2, got {d}")

    rng = np.random.default_rng(seed)
    groups = rng.permutation(n).reshape(n // k, k)
    edges = []
    for cycle in groups.tolist():
        edges.extend(zip(cycle, cycle[1:] + cycle[:1]))
    logger.debug("Generated disjoint cycles", n=n, cycles=n // k, length=k, seed=seed)
    return BoundedDegreeGraph.from_edges(n, d, edges)


def gen_planted(
    n: int,
    d: int,
    k: int,
    seed: int,
    new_tree_probability: float = DEFAULT_NEW_TREE_PROBABILITY
) -> BoundedDegreeGraph:
    """Random forest plus exactly k extra edges, each inside one tree.

    Each added edge joins two non-adjacent vertices of the same component
    with spare degree, so the distance to cycle-freeness is exactly k.

    Raises:
        InvalidArgumentError: If k edges cannot be placed under the degree cap
    """
    if k < 0:
        raise InvalidArgumentError(f"Planted count must be >= 0, got {k}")
    if n < 1 or d < 1:
        raise InvalidArgumentError(f"Need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    edges = _forest_edges(n, d, rng, new_tree_probability)
    if k == 0:
        return BoundedDegreeGraph.from_edges(n, d, edges)
    if d < 2:
        raise InvalidArgumentError(f"Cannot plant cycles with degree bound d={d}")

    adjacency: List[set] = [set() for _ in range(n)]
    for u, v in edges:
        adjacency[u].add(v)
        adjacency[v].add(u)
    _, labels = _components(n, edges)

    for planted in range(k):
        spare = [int(v) for v in rng.permutation(n) if len(adjacency[v]) < d]
        by_component: Dict[int, List[int]] = {}
        for v in spare:
            by_component.setdefault(int(labels[v]), []).append(v)

        chosen = None
        for u in spare:
            candidates = [
                v for v in by_component[int(labels[u])]
                if v != u and v not in adjacency[u]
            ]
            if candidates:
                chosen = (u, candidates[int(rng.integers(len(candidates)))])
                break
        if chosen is None:
            raise InvalidArgumentError(
                f"Cannot plant {k} cycles in a forest with n={n}, d={d}: only {planted} fit"
            )
        u, v = chosen
        adjacency[u].add(v)
        adjacency[v].add(u)
        edges.append((min(u, v), max(u, v)))

    logger.debug("Generated planted instance", n=n, d=d, planted=k, seed=seed)
    return BoundedDegreeGraph.from_edges(n, d, edges)


def gen_well_connected(n: int, d: int, seed: int, regularity: Optional[int] = None) -> BoundedDegreeGraph:
    """Random r-regular graph with r = min(d, n-1), lowered by one when n*r is odd.

    Raises:
        InvalidArgumentError: If r would fall below 2 or exceed d
    """
    r = regularity if regularity is not None else min(d, n - 1)
    if r > d:
        raise InvalidArgumentError(f"Regularity {r} exceeds the degree bound {d}")
    if (n * r) % 2 == 1:
        r -= 1
    if r < 2 or r >= n:
        raise InvalidArgumentError(f"Need 2 <= r < n for a cyclic regular graph, got r={r}, n={n}")
    regular = nx.random_regular_graph(r, n, seed=seed)
    logger.debug("Generated well-connected instance", n=n, r=r, seed=seed)
    return BoundedDegreeGraph.from_edges(n, d, regular.edges())


def _components(n: int, edges: Iterable[Tuple[int, int]]) -> Tuple[int, np.ndarray]:
    edges = list(edges)
    rows = [u for u, _ in edges]
    cols = [v for _, v in edges]
    matrix = sparse.coo_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))
    return connected_components(matrix, directed=False)


def distance_to_cycle_freeness(graph: BoundedDegreeGraph) -> int:
    """Exact number of edge deletions needed to reach a forest: |E| - n + #components."""
    count, _ = _components(graph.n, graph.edges())
    return graph.edge_count - graph.n + int(count)


def is_eps_far(graph: BoundedDegreeGraph, eps: float) -> bool:
    """True iff more than eps*n*d edges must be removed (strict, exact arithmetic)."""
    if not 0 < eps < 1:
        raise InvalidArgumentError(f"Need 0 < eps < 1, got {eps}")
    threshold = Fraction(eps).limit_denominator(10**9) * graph.n * graph.d
    return distance_to_cycle_freeness(graph) > threshold


def reference_verdict(graph: BoundedDegreeGraph, eps: float) -> str:
    """Two-sided ground truth from the exact distance oracle."""
    return FarLabel.FAR if is_eps_far(graph, eps) else FarLabel.NOT_FAR


def eps_key(eps: float) -> str:
    return f"{eps:g}"


def generate(spec: InstanceSpec) -> BoundedDegreeGraph:
    """Dispatch an InstanceSpec to its family generator."""
    if spec.family == InstanceFamily.FOREST:
        return gen_forest(spec.n, spec.d, spec.seed)
    if spec.family == InstanceFamily.DISJOINT_CYCLES:
        return gen_disjoint_cycles(spec.eps, spec.n, spec.seed, d=spec.d)
    if spec.family == InstanceFamily.PLANTED:
        return gen_planted(spec.n, spec.d, spec.planted, spec.seed)
    return gen_well_connected(spec.n, spec.d, spec.seed, regularity=spec.regularity)


def build_instance(spec: InstanceSpec, label_eps: Iterable[float] = ()) -> GeneratedInstance:
    """Generate an instance and record its exact distance and eps-far labels."""
    graph = generate(spec)
    distance = distance_to_cycle_freeness(graph)
    labels = {eps_key(eps): reference_verdict(graph, eps) == FarLabel.FAR for eps in label_eps}
    if spec.eps is not None:
        labels.setdefault(eps_key(spec.eps), reference_verdict(graph, spec.eps) == FarLabel.FAR)
    logger.info(
        f"Built {spec.family} instance",
        n=graph.n, d=graph.d, edges=graph.edge_count, distance=distance, seed=spec.seed
    )
    return GeneratedInstance(spec=spec, graph=graph, distance=distance, eps_far=labels)
