"""Tests for the command-line interface."""

import json
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from src.main import cli
from src.utils.graph_io import read_metadata

STAR = "4 3 3\n0 1\n0 2\n0 3\n"
TRIANGLE = "3 2 3\n0 1\n1 2\n2 0\n"


class TestCli:
    """End-to-end tests of the subcommands."""

    def setup_method(self):
        """Setup test fixtures."""
        self.temp_dir = Path(tempfile.mkdtemp())
        self.runner = CliRunner()
        self.logger_patch = patch("src.main.setup_development_logger")
        self.logger_patch.start()

    def teardown_method(self):
        self.logger_patch.stop()

    def invoke(self, *args):
        return self.runner.invoke(cli, ["--out", str(self.temp_dir / "out"), *args])

    def write(self, name: str, text: str) -> Path:
        path = self.temp_dir / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_gen(self):
        """Test instance generation with a metadata sidecar."""
        output = self.temp_dir / "cycles.txt"

        result = self.invoke("gen", "disjoint-cycles", str(output), "--n", "8", "--d", "2", "--eps", "0.25")

        assert result.exit_code == 0, result.output
        assert "distance=2" in result.output
        assert output.read_text(encoding="utf-8").startswith("8 2 8\n")
        assert read_metadata(output)["distance"] == 2

    def test_tester_reports_generated_instance(self):
        """Test that the tester shows and records the sidecar written by gen."""
        graph = self.temp_dir / "cycles.txt"
        report = self.temp_dir / "cycles.json"
        self.invoke("gen", "disjoint-cycles", str(graph), "--n", "8", "--d", "2", "--eps", "0.25")

        result = self.invoke("test", str(graph), "--eps", "0.25", "--ell", "10", "--m", "20",
                             "--num-starts", "2", "--report", str(report))

        assert result.exit_code == 0, result.output
        # 2 deletions against eps*n*d = 4
        assert "Instance: disjoint-cycles seed=0, distance 2, eps-far at eps=0.25: False" in result.output
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert payload["instance"]["distance"] == 2

    def test_tester_broken_sidecar(self):
        """Test that an unreadable sidecar exits with 1."""
        graph = self.write("star.txt", STAR)
        (self.temp_dir / "star.txt.meta.json").write_text("{", encoding="utf-8")

        result = self.invoke("test", str(graph), "--eps", "0.25", "--ell", "5", "--m", "5")

        assert result.exit_code == 1
        assert "invalid metadata JSON" in result.output

    def test_gen_invalid(self):
        """Test that missing eps for disjoint cycles exits with 1."""
        result = self.invoke("gen", "disjoint-cycles", str(self.temp_dir / "x.txt"), "--n", "8")
        assert result.exit_code == 1
        assert "needs eps" in result.output

    def test_tester_rejects_triangle(self):
        """Test the tester on a triangle with a JSON report."""
        graph = self.write("triangle.txt", TRIANGLE)
        report = self.temp_dir / "reports" / "run.json"

        result = self.invoke("test", str(graph), "--eps", "0.25", "--ell", "40", "--m", "100",
                             "--num-starts", "3", "--report", str(report))

        assert result.exit_code == 0, result.output
        assert "Verdict: REJECT" in result.output
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert payload["verdict"] == "REJECT"
        assert sorted(payload["certificate"]) == [0, 1, 2]
        assert payload["params"]["ell"] == 40

    def test_tester_accepts_star(self):
        """Test that a tree is accepted."""
        graph = self.write("star.txt", STAR)

        result = self.invoke("test", str(graph), "--eps", "0.25", "--ell", "20", "--m", "20")

        assert result.exit_code == 0, result.output
        assert "Verdict: ACCEPT" in result.output

    @pytest.mark.parametrize("mode", ["paper", "theory"])
    def test_tester_paper_mode(self, mode):
        """Test that the asymptotic schedule is selectable as paper and under its older name."""
        graph = self.write("star.txt", STAR)
        report = self.temp_dir / "paper.json"

        result = self.invoke("test", str(graph), "--eps", "0.5", "--mode", mode, "--ell", "10",
                             "--m", "10", "--num-starts", "2", "--report", str(report))

        assert result.exit_code == 0, result.output
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert payload["params"]["mode"] == "paper"

    def test_tester_bad_graph(self):
        """Test that malformed graph files exit with 1."""
        graph = self.write("bad.txt", "3 2 2\n0 1\n")
        result = self.invoke("test", str(graph), "--eps", "0.25")
        assert result.exit_code == 1

    def test_tester_bad_eps(self):
        """Test that eps outside (0, 1) exits with 1."""
        graph = self.write("star.txt", STAR)
        result = self.invoke("test", str(graph), "--eps", "1.5")
        assert result.exit_code == 1

    def test_analyze(self):
        """Test edge classification output and walk dumps."""
        graph = self.write("star.txt", STAR)
        output = self.temp_dir / "analysis.json"
        walks = self.temp_dir / "walks.txt"

        result = self.invoke("analyze", str(graph), "--alpha", "0.2", "--ell", "10", "--eps", "0.1",
                             "--output", str(output), "--dump-walks", str(walks), "--dump-count", "3")

        assert result.exit_code == 0, result.output
        payload = json.loads(output.read_text(encoding="utf-8"))
        assert set(payload) == {"graph", "classification", "checks", "recessive", "blue"}
        assert set(payload["checks"]) == {
            "dominant_forest", "no_bidirectional_dominance", "dominant_path_through_edge",
        }
        # three walks of 11 vertices separated by blank lines
        assert walks.read_text(encoding="utf-8").count("\n") == 3 * 11 + 2

    def test_analyze_too_few_samples(self):
        """Test that an undersized sample exits with 2."""
        graph = self.write("star.txt", STAR)

        result = self.invoke("analyze", str(graph), "--alpha", "0.2", "--ell", "10", "--samples", "10")

        assert result.exit_code == 2

    def test_analyze_bad_component(self):
        """Test that a malformed vertex list exits with 1."""
        graph = self.write("star.txt", STAR)
        result = self.invoke("analyze", str(graph), "--alpha", "0.2", "--ell", "10", "--component", "0,a")
        assert result.exit_code == 1

    def test_sweep(self):
        """Test a small sweep writes all report files."""
        result = self.invoke("sweep", "--family", "uniform-forest", "--n", "32", "--eps", "0.25",
                             "--trials", "2", "--ell", "10", "--m", "10", "--num-starts", "2", "--resume")

        assert result.exit_code == 0, result.output
        assert "rejected 0/2" in result.output
        out = self.temp_dir / "out"
        for name in ("summary.csv", "trials.csv", "report.json"):
            assert (out / name).exists()
        assert (out / "sweep_state.completed").exists()

    def test_sweep_invalid_grid(self):
        """Test that an invalid eps exits with 1."""
        result = self.invoke("sweep", "--family", "uniform-forest", "--n", "32", "--eps", "2.0")
        assert result.exit_code == 1

    def test_sweep_disjoint_cycles_too_small(self):
        """Test that a disjoint-cycles cell smaller than one cycle exits with 1."""
        result = self.invoke("sweep", "--family", "disjoint-cycles", "--n", "5", "--d", "2", "--eps", "0.1",
                             "--trials", "1")

        assert result.exit_code == 1
        assert "hold no cycle" in result.output

    def test_scaling_too_few_points(self):
        """Test that a narrow exponent range exits with 1."""
        result = self.invoke("scaling", "--min-exp", "4", "--max-exp", "6")
        assert result.exit_code == 1
