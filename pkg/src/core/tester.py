"""Cycle Finder and the one-sided Cycle-freeness Tester.

Cycle Finder runs m lazy walks of length ell from a start vertex, queries the
neighborhood of every visited vertex once and rejects iff the induced subgraph
on the visited vertices contains a cycle. The tester runs Cycle Finder from
ceil(c/eps) uniformly sampled starts (with replacement) and rejects iff some
run rejects. A forest can never be rejected: every certificate is a cycle of
the input graph and is re-verified through the oracle.
"""

import math
import time
from typing import Optional

import networkx as nx
import numpy as np

from src.core.errors import InvalidArgumentError, TesterInvariantError
from src.core.oracle import neighbor_rows, neighbors
from src.core.walks import visit_walks
from src.models.graph import BoundedDegreeGraph, QueryMeter
from src.models.params import ParamMode, TesterParams, log2_at_least_one
from src.models.verdict import (
    CycleCertificate,
    ExploredSubgraph,
    Outcome,
    StartDiagnostics,
    TestVerdict,
)
from src.utils.logger import get_logger
from src.utils.rng import spawn

logger = get_logger(__name__)


def params_paper(n: int, d: int, eps: float, c: float = 1.0, cap_factor: int = 4) -> TesterParams:
    """Asymptotic schedule (log base 2, rounded up).

    ell = log2(n/eps)^6 * eps^-8, m = c * eps^-3 * sqrt(n) * ell * log2(n)^2,
    num_starts = c / eps. Only usable for formula checks at realistic n.
    """
    if n < 2:
        raise InvalidArgumentError(f"Paper schedule needs n >= 2, got {n}")
    if not 0 < eps < 1 or c < 1:
        raise InvalidArgumentError(f"Need 0 < eps < 1 and c >= 1, got eps={eps}, c={c}")
    ell = math.ceil(math.log2(n / eps) ** 6 * eps ** -8)
    m = math.ceil(c * eps ** -3 * math.sqrt(n) * ell * math.log2(n) ** 2)
    return TesterParams(
        eps=eps, ell=ell, m=m, num_starts=math.ceil(c / eps), c=c,
        mode=ParamMode.PAPER, n=n, certificate_cap=max(3, cap_factor * ell)
    )


def params_desk(
    n: int,
    d: int,
    eps: float,
    beta_ell: float = 4.0,
    beta_walks: float = 2.0,
    c: float = 1.0,
    cap_factor: int = 4
) -> TesterParams:
    """Desk-scale schedule: ell = beta_ell/eps * log2(n)^2, m = beta_walks/eps * sqrt(n) * log2(n)."""
    if not 0 < eps < 1:
        raise InvalidArgumentError(f"Need 0 < eps < 1, got {eps}")
    log_n = log2_at_least_one(n)
    ell = max(1, math.ceil(beta_ell / eps * log_n ** 2))
    m = max(1, math.ceil(beta_walks / eps * math.sqrt(n) * log_n))
    return TesterParams(
        eps=eps, ell=ell, m=m, num_starts=max(1, math.ceil(c / eps)), c=c,
        mode=ParamMode.DESK, n=n, certificate_cap=max(3, cap_factor * ell)
    )


def build_params(
    n: int,
    d: int,
    eps: float,
    mode: str = ParamMode.DESK,
    beta_ell: float = 4.0,
    beta_walks: float = 2.0,
    c: float = 1.0,
    cap_factor: int = 4,
    ell: Optional[int] = None,
    m: Optional[int] = None,
    num_starts: Optional[int] = None
) -> TesterParams:
    """Schedule for the given mode with explicit ell, m or num_starts taking precedence.

    "theory" is accepted as another name for mode "paper".
    """
    mode = ParamMode.canonical(mode)
    if mode == ParamMode.PAPER:
        params = params_paper(n, d, eps, c=c, cap_factor=cap_factor)
    elif mode == ParamMode.DESK:
        params = params_desk(n, d, eps, beta_ell=beta_ell, beta_walks=beta_walks, c=c, cap_factor=cap_factor)
    else:
        raise InvalidArgumentError(f"Unknown parameter mode: {mode}")

    overrides = {k: v for k, v in (("ell", ell), ("m", m), ("num_starts", num_starts)) if v is not None}
    if not overrides:
        return params
    fields = params.model_dump()
    fields.update(overrides)
    fields["certificate_cap"] = max(3, cap_factor * fields["ell"])
    try:
        return TesterParams(**fields)
    except ValueError as e:
        raise InvalidArgumentError(f"Invalid schedule override: {e}")


def explore_subgraph(graph: BoundedDegreeGraph, visited: np.ndarray, meter: QueryMeter) -> ExploredSubgraph:
    """Query each visited vertex's neighborhood once and keep edges inside the visited set."""
    vertices = np.flatnonzero(visited)
    rows = neighbor_rows(graph, vertices, meter)
    tails = np.repeat(vertices, rows.shape[1])
    heads = rows.ravel()
    keep = heads >= 0
    keep[keep] = visited[heads[keep]]
    keep &= tails < heads
    edges = list(zip(tails[keep].tolist(), heads[keep].tolist()))
    return ExploredSubgraph(vertices=set(vertices.tolist()), edges=edges)


def extract_cycle(sub: ExploredSubgraph, exhaustive: bool = False) -> Optional[CycleCertificate]:
    """Shortest cycle through the first edge that closes a cycle, or None for a forest.

    Edges are scanned in sorted order with a union-find; the first edge whose
    endpoints are already connected is closed by a BFS shortest path that
    avoids it. With exhaustive=True every such edge is tried and the overall
    shortest cycle (the girth cycle of sub) is returned.
    """
    components = nx.utils.UnionFind(sorted(sub.vertices))
    closing = []
    for u, v in sorted(sub.edges):
        if components[u] == components[v]:
            closing.append((u, v))
            if not exhaustive:
                break
        else:
            components.union(u, v)

    if not closing:
        return None

    explored = nx.Graph()
    explored.add_nodes_from(sorted(sub.vertices))
    explored.add_edges_from(sorted(sub.edges))
    best = None
    for u, v in closing:
        explored.remove_edge(u, v)
        path = nx.shortest_path(explored, u, v)
        explored.add_edge(u, v)
        if best is None or len(path) < len(best):
            best = path
    return CycleCertificate(cycle=[int(x) for x in best])


def verify_certificate(
    graph: BoundedDegreeGraph,
    cert: CycleCertificate,
    meter: Optional[QueryMeter] = None
) -> bool:
    """True iff cert is a simple cycle of length >= 3 whose edges all exist (checked via the oracle)."""
    meter = meter if meter is not None else QueryMeter()
    cycle = cert.cycle
    if len(cycle) < 3 or len(set(cycle)) != len(cycle):
        return False
    if any(not 0 <= v < graph.n for v in cycle):
        return False
    for a, b in cert.edges():
        if b not in neighbors(graph, a, meter):
            return False
    return True


def cycle_finder(
    graph: BoundedDegreeGraph,
    s: int,
    params: TesterParams,
    rng: np.random.Generator,
    meter: QueryMeter,
    chunk_size: int = 65536
) -> TestVerdict:
    """Cycle Finder from start vertex s.

    Raises:
        TesterInvariantError: If the explored-edge or query bound is exceeded
    """
    local = QueryMeter()
    visited = visit_walks(graph, s, params.ell, params.m, rng, local, chunk_size=chunk_size)
    sub = explore_subgraph(graph, visited, local)

    if len(sub.edges) > params.explored_edge_bound(graph.d):
        raise TesterInvariantError(
            f"Explored {len(sub.edges)} edges, bound d*m*ell is {params.explored_edge_bound(graph.d)}"
        )
    if local.total > params.query_bound(len(sub.vertices)):
        raise TesterInvariantError(
            f"Cycle Finder used {local.total} queries, bound is {params.query_bound(len(sub.vertices))}"
        )

    certificate = extract_cycle(sub)
    if certificate is not None and certificate.length > params.certificate_cap:
        logger.warning(
            "Certificate longer than cap",
            start=s, length=certificate.length, cap=params.certificate_cap
        )
    meter.merge(local)

    outcome = Outcome.REJECT if certificate is not None else Outcome.ACCEPT
    diagnostics = StartDiagnostics(
        start=s,
        outcome=outcome,
        visited=len(sub.vertices),
        explored_edges=len(sub.edges),
        neighbor_queries=local.neighbor_queries,
        degree_queries=local.degree_queries,
        certificate_length=certificate.length if certificate else None,
    )
    logger.debug("Cycle Finder finished", **diagnostics.model_dump())
    return TestVerdict(outcome=outcome, certificate=certificate, meter=local.snapshot(), starts=[diagnostics])


def cycle_freeness_tester(
    graph: BoundedDegreeGraph,
    eps: float,
    params: TesterParams,
    rng: np.random.Generator,
    chunk_size: int = 65536
) -> TestVerdict:
    """One-sided tester: ACCEPT iff Cycle Finder accepts from every sampled start.

    Stops at the first rejecting start; its certificate is verified before
    being returned.
    """
    if not 0 < eps < 1:
        raise InvalidArgumentError(f"Need 0 < eps < 1, got {eps}")
    if not math.isclose(eps, params.eps):
        logger.warning("Tester eps differs from the eps the schedule was built for", eps=eps, params_eps=params.eps)

    started = time.perf_counter()
    starts = rng.integers(0, graph.n, size=params.num_starts)
    streams = spawn(rng, params.num_starts)

    meter = QueryMeter()
    verification = QueryMeter()
    diagnostics = []
    certificate = None
    for s, stream in zip(starts.tolist(), streams):
        run = cycle_finder(graph, s, params, stream, meter, chunk_size=chunk_size)
        diagnostics.extend(run.starts)
        if run.rejected:
            if not verify_certificate(graph, run.certificate, verification):
                raise TesterInvariantError(f"Certificate {run.certificate.cycle} failed verification")
            certificate = run.certificate
            break

    verdict = TestVerdict(
        outcome=Outcome.REJECT if certificate else Outcome.ACCEPT,
        certificate=certificate,
        meter=meter,
        verification_meter=verification,
        starts=diagnostics,
    )
    logger.info(
        f"Cycle-freeness tester: {verdict.outcome}",
        n=graph.n,
        eps=eps,
        starts_run=len(diagnostics),
        queries=meter.total,
        certificate_length=certificate.length if certificate else None,
        seconds=round(time.perf_counter() - started, 4),
    )
    return verdict
