"""Lazy random walks and loop-erased path induction.

Every step from a vertex v of degree d' moves to each neighbor with
probability exactly 1/(2d) and stays put with probability 1 - d'/(2d) >= 1/2.
"""

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from src.core.errors import InvalidArgumentError, ResourceLimitError
from src.core.oracle import degree, degree_batch, neighbor_at_batch, neighbors
from src.models.graph import BoundedDegreeGraph, QueryMeter
from src.models.walk import InducedPath, Walk
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_EXACT_BUDGET = 50_000_000
# floats per block of simultaneous absorbing targets in the all-targets DP
EXACT_BLOCK_FLOATS = 1 << 22


def lazy_step(graph: BoundedDegreeGraph, v: int, rng: np.random.Generator, meter: QueryMeter) -> int:
    """One lazy step from v.

    Always spends one degree query; spends one neighbor query only when moving.
    """
    deg = degree(graph, v, meter)
    slot = int(rng.integers(2 * graph.d))
    if slot < deg:
        return neighbors(graph, v, meter)[slot]
    return v


def lazy_walk(
    graph: BoundedDegreeGraph,
    s: int,
    ell: int,
    rng: np.random.Generator,
    meter: QueryMeter
) -> Walk:
    """Walk of exactly ell lazy steps from s."""
    if not 0 <= s < graph.n:
        raise InvalidArgumentError(f"Vertex {s} is outside 0..{graph.n - 1}")
    if ell < 0:
        raise InvalidArgumentError(f"Walk length must be >= 0, got {ell}")
    steps = [s]
    current = s
    for _ in range(ell):
        current = lazy_step(graph, current, rng, meter)
        steps.append(current)
    return Walk(start=s, steps=steps)


def _advance(
    graph: BoundedDegreeGraph,
    current: np.ndarray,
    rng: np.random.Generator,
    meter: QueryMeter
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised lazy step for a batch of walkers; returns (next, moved mask)."""
    deg = degree_batch(graph, current, meter)
    slots = rng.integers(0, 2 * graph.d, size=current.size)
    moved = slots < deg
    nxt = current.copy()
    if moved.any():
        nxt[moved] = neighbor_at_batch(graph, current[moved], slots[moved], meter)
    return nxt, moved


def sample_walks(
    graph: BoundedDegreeGraph,
    s: int,
    ell: int,
    count: int,
    rng: np.random.Generator,
    meter: QueryMeter
) -> np.ndarray:
    """count independent lazy walks from s as a (count, ell + 1) array of vertex ids."""
    if not 0 <= s < graph.n:
        raise InvalidArgumentError(f"Vertex {s} is outside 0..{graph.n - 1}")
    if ell < 0 or count < 0:
        raise InvalidArgumentError(f"Need ell >= 0 and count >= 0, got ell={ell}, count={count}")

    trajectories = np.empty((count, ell + 1), dtype=np.int64)
    trajectories[:, 0] = s
    current = trajectories[:, 0].copy()
    for t in range(1, ell + 1):
        current, _ = _advance(graph, current, rng, meter)
        trajectories[:, t] = current
    return trajectories


def visit_walks(
    graph: BoundedDegreeGraph,
    s: int,
    ell: int,
    count: int,
    rng: np.random.Generator,
    meter: QueryMeter,
    chunk_size: int = 65536
) -> np.ndarray:
    """Run count lazy walks from s and return the boolean mask of visited vertices.

    Walks are simulated chunk_size at a time; trajectories are not kept.
    """
    if not 0 <= s < graph.n:
        raise InvalidArgumentError(f"Vertex {s} is outside 0..{graph.n - 1}")
    visited = np.zeros(graph.n, dtype=bool)
    visited[s] = True

    remaining = count
    while remaining > 0:
        batch = min(chunk_size, remaining)
        current = np.full(batch, s, dtype=np.int64)
        for _ in range(ell):
            current, moved = _advance(graph, current, rng, meter)
            visited[current[moved]] = True
        remaining -= batch
    return visited


def loop_erase(sequence: Iterable[int]) -> List[int]:
    """Left-to-right loop erasure: revisiting a vertex cuts the loop since its last position."""
    path: List[int] = []
    position: Dict[int, int] = {}
    for v in sequence:
        if v in position:
            cut = position[v]
            for w in path[cut + 1:]:
                del position[w]
            del path[cut + 1:]
        else:
            position[v] = len(path)
            path.append(v)
    return path


def induce_path(walk: Walk, target: int) -> Optional[InducedPath]:
    """Loop-erased path from walk.start to the first visit of target, or None if never reached."""
    try:
        first = walk.steps.index(target)
    except ValueError:
        return None
    return InducedPath(vertices=loop_erase(walk.steps[:first + 1]))


def first_visit_paths(steps: Sequence[int]) -> Dict[int, Tuple[Tuple[int, ...], int]]:
    """Induced path and arrival predecessor for every vertex a trajectory reaches.

    Single pass: the online loop-erased prefix at the moment of a first visit
    equals induce_path(walk, v). The start maps to ((s,), -1).
    """
    path: List[int] = []
    position: Dict[int, int] = {}
    first: Dict[int, Tuple[Tuple[int, ...], int]] = {}
    previous = -1
    for v in steps:
        v = int(v)
        if v in position:
            cut = position[v]
            for w in path[cut + 1:]:
                del position[w]
            del path[cut + 1:]
        else:
            position[v] = len(path)
            path.append(v)
            if v not in first:
                first[v] = (tuple(path), previous)
        previous = v
    return first


def transition_matrix(graph: BoundedDegreeGraph) -> sparse.csr_matrix:
    """Symmetric lazy-walk transition matrix (oracle-side, reads adjacency directly)."""
    rows, cols = [], []
    for u, nbrs in enumerate(graph.adjacency):
        rows.extend([u] * len(nbrs))
        cols.extend(nbrs)
    weight = 1.0 / (2 * graph.d)
    adjacency = sparse.csr_matrix(
        (np.full(len(rows), weight), (rows, cols)), shape=(graph.n, graph.n)
    )
    stay = 1.0 - graph.degree_array / (2.0 * graph.d)
    return (adjacency + sparse.diags(stay)).tocsr()


def _check_budget(graph: BoundedDegreeGraph, ell: int, budget: int, targets: int = 1) -> None:
    cost = targets * graph.n * max(ell, 1) * graph.d
    if cost > budget:
        raise ResourceLimitError(
            f"Exact reach DP over {targets} target(s) needs targets*n*ell*d={cost}, budget is {budget}",
            required=cost
        )


def reach_probability_exact(
    graph: BoundedDegreeGraph,
    s: int,
    v: int,
    ell: int,
    budget: int = DEFAULT_EXACT_BUDGET
) -> float:
    """Exact probability that a length-ell lazy walk from s visits v (q_s = 1).

    Raises:
        ResourceLimitError: If n*ell*d exceeds the budget
    """
    for x in (s, v):
        if not 0 <= x < graph.n:
            raise InvalidArgumentError(f"Vertex {x} is outside 0..{graph.n - 1}")
    _check_budget(graph, ell, budget)
    if s == v:
        return 1.0

    matrix = transition_matrix(graph)
    mass = np.zeros(graph.n)
    mass[s] = 1.0
    absorbed = 0.0
    for _ in range(ell):
        mass = matrix @ mass
        absorbed += mass[v]
        mass[v] = 0.0
    return float(min(absorbed, 1.0))


def reach_probabilities_exact(
    graph: BoundedDegreeGraph,
    s: int,
    ell: int,
    budget: int = DEFAULT_EXACT_BUDGET
) -> np.ndarray:
    """Exact q_v for every target v (one absorbing DP per target).

    Targets run in blocks of EXACT_BLOCK_FLOATS // n rows, so memory stays
    bounded by the block and the total work n*n*ell*d is charged up front.

    Raises:
        ResourceLimitError: If n*n*ell*d exceeds the budget
    """
    if not 0 <= s < graph.n:
        raise InvalidArgumentError(f"Vertex {s} is outside 0..{graph.n - 1}")
    _check_budget(graph, ell, budget, targets=graph.n)

    matrix = transition_matrix(graph)
    absorbed = np.zeros(graph.n)
    block = max(1, EXACT_BLOCK_FLOATS // graph.n)
    for first in range(0, graph.n, block):
        targets = np.arange(first, min(first + block, graph.n))
        rows = np.arange(len(targets))
        # row i holds the walk distribution with targets[i] absorbing
        mass = np.zeros((len(targets), graph.n))
        mass[:, s] = 1.0
        mass[targets == s, :] = 0.0
        for _ in range(ell):
            mass = (matrix @ mass.T).T
            absorbed[targets] += mass[rows, targets]
            mass[rows, targets] = 0.0
    absorbed[s] = 1.0
    logger.debug("Exact reach profile computed", n=graph.n, ell=ell, start=s, block=block)
    return np.minimum(absorbed, 1.0)


def format_walks(walks: Iterable[Sequence[int]]) -> str:
    """Debug dump: one vertex id per line, a blank line between walks."""
    blocks = ["\n".join(str(int(v)) for v in steps) for steps in walks]
    return "\n\n".join(blocks) + "\n"
