"""Tests for the reach, dominance and cycle-event oracles."""

import numpy as np
import pytest

from src.core.analysis import (
    blue_summary,
    check_dominant_forest,
    check_dominant_path_through_edge,
    check_no_bidirectional_dominance,
    check_special_vertex,
    classify_edges,
    closes_cycle,
    count_recessive_vs_bound,
    estimate_cyc,
    estimate_pair_detection,
    estimate_strong_vertices,
    reach_profile,
    recessive_report,
    walk_footprint,
)
from src.core.errors import InvalidArgumentError, ResourceLimitError
from src.core.walks import DEFAULT_EXACT_BUDGET
from src.core.generators import gen_disjoint_cycles, gen_forest
from src.models.analysis import (
    CheckStatus,
    DirectedEdgeLabel,
    EdgeClassification,
    EstimationMethod,
    StrengthLabel,
    VertexLabel,
)
from src.models.graph import BoundedDegreeGraph
from src.models.params import TesterParams
from src.models.walk import Walk
from src.utils.stats import required_samples

ALPHA = 0.2
CONFIDENCE = 0.999
SAMPLES = required_samples(ALPHA, CONFIDENCE)


@pytest.fixture
def star():
    return BoundedDegreeGraph.from_edges(4, 3, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def path5():
    return BoundedDegreeGraph.from_edges(5, 2, [(0, 1), (1, 2), (2, 3), (3, 4)])


@pytest.fixture
def triangle():
    return BoundedDegreeGraph.from_edges(3, 2, [(0, 1), (1, 2), (2, 0)])


def manual_classification(dominant, component=(0, 1, 2, 3), special=True, paths=None, blue=None):
    """EdgeClassification with the given directed edges dominant and all others not."""
    paths = paths or {}
    blue = blue or {}
    vertices = {
        v: VertexLabel(vertex=v, reach=100, q=1.0, dominant_path=paths.get(v), blue=blue.get(v))
        for v in component
    }
    edges = [
        DirectedEdgeLabel(tail=u, head=v, avoid_probability=0.0, dominant=dominant.get((u, v), False))
        for u in component for v in component if u != v and ((u, v) in dominant or (v, u) in dominant)
    ]
    return EdgeClassification(
        start=component[0], alpha=ALPHA, ell=8, samples=100, confidence=CONFIDENCE,
        component=list(component), special=special, vertices=vertices, edges=edges,
    )


class TestReachProfile:
    """Tests for exact and Monte Carlo reach profiles."""

    def test_exact_profile(self, path5):
        """Test that the exact profile has q_s = 1 and zero mass beyond ell."""
        profile = reach_profile(path5, 0, 2)

        assert profile.method == EstimationMethod.EXACT
        assert profile.q[0] == 1.0
        assert profile.q[3] == 0.0
        assert profile.q[4] == 0.0
        assert 0 < profile.q[2] < profile.q[1] < 1

    def test_monte_carlo_matches_exact(self, triangle):
        """Test the sampled profile against the DP."""
        exact = reach_profile(triangle, 0, 6)
        sampled = reach_profile(
            triangle, 0, 6, method=EstimationMethod.MONTE_CARLO, samples=20000, rng=np.random.default_rng(0)
        )

        assert sampled.q == pytest.approx(exact.q, abs=0.02)
        assert sampled.reach_counts[0] == 20000
        assert sampled.q_heavy is None

    def test_heavy_split_partitions_q(self, triangle):
        """Test that q_light + q_heavy == q."""
        profile = reach_profile(
            triangle, 0, 8, method=EstimationMethod.MONTE_CARLO, samples=500,
            rng=np.random.default_rng(1), heavy_samples=200
        )

        for q, light, heavy in zip(profile.q, profile.q_light, profile.q_heavy):
            assert light + heavy == pytest.approx(q)
        assert sum(profile.heavy_counts) > 0

    def test_invalid_requests(self, triangle):
        """Test bad methods, missing samples and bad starts."""
        with pytest.raises(InvalidArgumentError):
            reach_profile(triangle, 0, 4, method="guess")
        with pytest.raises(InvalidArgumentError):
            reach_profile(triangle, 0, 4, method=EstimationMethod.MONTE_CARLO)
        with pytest.raises(InvalidArgumentError):
            reach_profile(triangle, 3, 4)

    def test_exact_budget(self, triangle):
        """Test that the DP budget is enforced."""
        with pytest.raises(ResourceLimitError):
            reach_profile(triangle, 0, 100, budget=10)

    def test_exact_budget_counts_every_target(self):
        """Test that a 40000-vertex path is refused at ell=1 instead of exhausting memory."""
        n = 40_000
        path = BoundedDegreeGraph.from_edges(n, 2, [(i, i + 1) for i in range(n - 1)])

        with pytest.raises(ResourceLimitError) as excinfo:
            reach_profile(path, 0, 1)
        assert excinfo.value.required > DEFAULT_EXACT_BUDGET

    def test_check_special_vertex(self, path5):
        """Test the q_v > alpha premise on an exact profile."""
        profile = reach_profile(path5, 0, 2)

        assert check_special_vertex(profile, [0, 1], 0.1).status == CheckStatus.OK
        violation = check_special_vertex(profile, [0, 1, 3], 0.1)
        assert violation.status == CheckStatus.VIOLATION
        assert violation.kind == "premise"

    def test_check_special_vertex_borderline(self, triangle):
        """Test that an estimate straddling alpha is inconclusive."""
        profile = reach_profile(
            triangle, 0, 6, method=EstimationMethod.MONTE_CARLO, samples=50, rng=np.random.default_rng(0)
        )
        q1 = profile.q[1]

        assert check_special_vertex(profile, [1], q1, CONFIDENCE).status == CheckStatus.INCONCLUSIVE


class TestClassifyEdges:
    """Tests for isolated/dominant/recessive labels."""

    def test_star_edges_out_of_center_dominant(self, star):
        """Test that every <center, leaf> is dominant and nothing points back."""
        cls = classify_edges(star, 0, ALPHA, 8, SAMPLES, np.random.default_rng(0), CONFIDENCE)

        assert cls.component == [0, 1, 2, 3]
        assert cls.special is True
        assert sorted(cls.dominant_edges()) == [(0, 1), (0, 2), (0, 3)]
        assert cls.uncertain_edges() == []
        assert cls.conclusive
        for leaf in (1, 2, 3):
            assert cls.vertices[leaf].dominant_path == [0, leaf]
            assert cls.vertices[leaf].isolated is True

    def test_star_checks_pass(self, star):
        """Test that all dominance properties hold on a star."""
        cls = classify_edges(star, 0, ALPHA, 8, SAMPLES, np.random.default_rng(0), CONFIDENCE)

        assert check_dominant_forest(cls).ok
        assert check_no_bidirectional_dominance(cls).ok
        assert check_dominant_path_through_edge(cls).ok

    def test_path_has_no_recessive_edges(self, path5):
        """Test that a tree has no recessive edges and rank zero."""
        cls = classify_edges(path5, 0, ALPHA, 12, SAMPLES, np.random.default_rng(2), CONFIDENCE)
        report = recessive_report(cls)

        assert report.certain_recessive == 0
        assert report.circuit_rank == 0
        assert report.bound_holds is True
        assert check_dominant_forest(cls).ok

    def test_triangle_recessive_bound(self, triangle):
        """Test that a triangle has at least rank(G_S) = 1 recessive edge."""
        cls = classify_edges(triangle, 0, ALPHA, 8, SAMPLES, np.random.default_rng(3), CONFIDENCE)
        report = recessive_report(cls)

        assert report.component_size == 3
        assert report.circuit_rank == 1
        assert report.certain_recessive >= 1
        assert report.bound_holds is True
        assert check_dominant_forest(cls).ok

    def test_count_recessive_vs_bound(self, path5):
        """Test the one-call recessive report."""
        report = count_recessive_vs_bound(path5, 0, ALPHA, 12, SAMPLES, np.random.default_rng(2), CONFIDENCE)

        assert report.start == 0
        assert report.bound_holds is True

    def test_explicit_component(self, star):
        """Test that only edges inside an explicit S are labeled."""
        cls = classify_edges(star, 0, ALPHA, 8, SAMPLES, np.random.default_rng(0), CONFIDENCE, component=[0, 1])

        assert cls.component == [0, 1]
        assert sorted((e.tail, e.head) for e in cls.edges) == [(0, 1), (1, 0)]

    def test_too_few_samples(self, star):
        """Test that undersized samples raise with the required count."""
        with pytest.raises(ResourceLimitError) as excinfo:
            classify_edges(star, 0, ALPHA, 8, 100, np.random.default_rng(0), CONFIDENCE)
        assert excinfo.value.required == SAMPLES

    def test_invalid_arguments(self, star):
        """Test alpha range and component membership checks."""
        with pytest.raises(InvalidArgumentError):
            classify_edges(star, 0, 1.5, 8, SAMPLES)
        with pytest.raises(InvalidArgumentError):
            classify_edges(star, 0, ALPHA, 8, SAMPLES, np.random.default_rng(0), CONFIDENCE, component=[0, 9])


class TestDominanceChecks:
    """Tests for the property checks on hand-built classifications."""

    def test_indegree_violation(self):
        """Test two dominant edges into one vertex."""
        cls = manual_classification({(0, 2): True, (1, 2): True})

        result = check_dominant_forest(cls)

        assert result.status == CheckStatus.VIOLATION
        assert result.kind == "indegree"
        assert sorted(result.edges) == [(0, 2), (1, 2)]

    def test_cycle_violation(self):
        """Test dominant edges forming a directed cycle."""
        cls = manual_classification({(0, 1): True, (1, 2): True, (2, 0): True})

        result = check_dominant_forest(cls)

        assert result.status == CheckStatus.VIOLATION
        assert result.kind == "cycle"

    def test_bidirectional_violation(self):
        """Test both directions of one edge dominant."""
        cls = manual_classification({(0, 1): True, (1, 0): True})

        result = check_no_bidirectional_dominance(cls)

        assert result.status == CheckStatus.VIOLATION
        assert result.edges == [(0, 1), (1, 0)]

    def test_path_miss_violation(self):
        """Test a dominant edge that the dominant path avoids."""
        cls = manual_classification({(0, 1): True}, paths={1: [0, 2, 1]})

        result = check_dominant_path_through_edge(cls)

        assert result.status == CheckStatus.VIOLATION
        assert result.kind == "path-miss"

    def test_path_through_edge_ok(self):
        """Test a dominant edge on the dominant path."""
        cls = manual_classification({(0, 1): True, (1, 2): True}, paths={1: [0, 1], 2: [0, 1, 2]})
        assert check_dominant_path_through_edge(cls).ok

    def test_premise_not_established(self):
        """Test that checks are inconclusive without the special-vertex premise."""
        cls = manual_classification({(0, 2): True, (1, 2): True}, special=None)

        result = check_dominant_forest(cls)

        assert result.status == CheckStatus.INCONCLUSIVE
        assert result.kind == "premise"

    def test_uncertain_edges_inconclusive(self):
        """Test that borderline labels keep checks inconclusive."""
        cls = manual_classification({(0, 1): None})

        result = check_no_bidirectional_dominance(cls)

        assert result.status == CheckStatus.INCONCLUSIVE
        assert result.edges == [(0, 1)]

    def test_recessive_report_tri_state(self):
        """Test that uncertain edges make the bound undecided."""
        # Triangle on S = {0, 1, 2}: rank 1, one edge uncertain and no certain recessive edge
        cls = manual_classification(
            {(0, 1): True, (1, 2): True, (2, 0): None}, component=(0, 1, 2)
        )

        report = recessive_report(cls)

        assert report.circuit_rank == 1
        assert report.certain_recessive == 0
        assert report.uncertain_edges == 1
        assert report.bound_holds is None


class TestBlueSummary:
    """Tests for blue-vertex counts."""

    @pytest.mark.parametrize("labels,expected", [
        ({0: True, 1: True, 2: False, 3: False}, True),
        ({0: True, 1: False, 2: False, 3: False}, False),
        ({0: True, 1: None, 2: False, 3: False}, None),
    ])
    def test_exceeds(self, labels, expected):
        """Test the eps*|S|/2 comparison with uncertain vertices."""
        cls = manual_classification({}, blue=labels)

        summary = blue_summary(cls, 0.5)

        # eps*|S|/2 = 0.5 * 4 / 2
        assert summary.threshold == 1.0
        assert summary.exceeds is expected

    def test_blue_vertices(self):
        """Test listing certainly-blue vertices."""
        cls = manual_classification({}, blue={0: True, 1: None, 2: False, 3: True})
        assert cls.blue_vertices() == [0, 3]


class TestCycleEvents:
    """Tests for cyc estimates and pair detection."""

    def test_walk_footprint(self):
        """Test visited vertices and traversed edges of a trajectory."""
        vertices, edges = walk_footprint([0, 0, 1, 2, 1])

        assert vertices == frozenset({0, 1, 2})
        assert edges == frozenset({(0, 1), (1, 2)})

    def test_closes_cycle_via_joining_edge(self, triangle):
        """Test that a graph edge between the two walks closes the triangle."""
        first = walk_footprint([0, 1, 2])
        second = walk_footprint([0])

        assert closes_cycle(triangle, first, second)

    def test_tree_never_closes(self, path5):
        """Test that walks on a tree never form a cycle."""
        assert not closes_cycle(path5, walk_footprint([0, 1, 2, 3]), walk_footprint([0, 1, 2, 3, 4]))

    def test_cyc_on_triangle(self, triangle):
        """Test that a walk covering the triangle has cyc = 1."""
        stats = estimate_cyc(triangle, Walk(start=0, steps=[0, 1, 2]), 4, 200, np.random.default_rng(0))

        assert stats.hits == 200
        assert stats.cyc == 1.0
        assert stats.heavy is True
        assert stats.threshold == pytest.approx(1 / np.sqrt(3))

    def test_cyc_on_tree(self, path5):
        """Test that cyc is zero on a tree and the walk is light."""
        stats = estimate_cyc(path5, Walk(start=0, steps=[0, 1, 2]), 6, 300, np.random.default_rng(0))

        assert stats.cyc == 0.0
        assert stats.heavy is False

    def test_pair_detection(self, triangle, path5):
        """Test pair detection on a cycle and on a tree."""
        on_triangle = estimate_pair_detection(triangle, 0, 8, 300, np.random.default_rng(0))
        on_tree = estimate_pair_detection(path5, 0, 8, 300, np.random.default_rng(0))

        assert on_triangle.rate > 0.5
        assert on_tree.hits == 0
        assert on_tree.ci_low == 0.0

    def test_invalid_counts(self, triangle):
        """Test that zero samples are rejected."""
        with pytest.raises(InvalidArgumentError):
            estimate_cyc(triangle, Walk(start=0, steps=[0]), 4, 0)
        with pytest.raises(InvalidArgumentError):
            estimate_pair_detection(triangle, 0, 4, 0)


class TestStrongVertices:
    """Tests for per-vertex Cycle Finder strength."""

    def test_cycles_strong_forest_weak(self):
        """Test strength labels on a cyclic and an acyclic instance."""
        params = TesterParams(eps=0.25, ell=40, m=50, num_starts=1)
        cycles = gen_disjoint_cycles(0.25, 8, seed=0)
        forest = gen_forest(8, 3, seed=0)

        strong = estimate_strong_vertices(cycles, params, trials=12, seed=0, vertices=[0, 5])
        weak = estimate_strong_vertices(forest, params, trials=12, seed=0)

        assert [e.label for e in strong] == [StrengthLabel.STRONG, StrengthLabel.STRONG]
        assert all(e.rejections == 0 and e.label == StrengthLabel.WEAK for e in weak)
        assert len(weak) == 8

    def test_invalid_trials(self):
        """Test that at least one trial is needed."""
        params = TesterParams(eps=0.25, ell=4, m=2, num_starts=1)
        with pytest.raises(InvalidArgumentError):
            estimate_strong_vertices(gen_forest(4, 3, seed=0), params, trials=0, seed=0)
