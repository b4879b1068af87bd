"""Tests for ReportWriter module."""

import json
import tempfile
from pathlib import Path
from unittest.mock import patch

import pandas as pd
import pytest

from src.core.report_writer import (
    SUMMARY_COLUMNS,
    TRIAL_COLUMNS,
    ReportExportError,
    ReportWriter,
)
from src.models.experiment import CellSummary, ExperimentSpec, RunReport, ScalingFit, TrialRow


def make_report(record_timing: bool = False) -> RunReport:
    """Small two-trial report built by hand."""
    spec = ExperimentSpec(family="disjoint-cycles", n_values=[8], eps_values=[0.25], trials=2,
                          record_timing=record_timing)
    rows = [
        TrialRow(cell=0, trial=0, seed=0, n=8, outcome="REJECT", certificate_length=4,
                 certificate_valid=True, neighbor_queries=30, degree_queries=70, total_queries=100,
                 distance=2, eps_far=False, certificate=[0, 1, 2, 3], wall_time_s=0.5),
        TrialRow(cell=0, trial=1, seed=1, n=8, outcome="ACCEPT", neighbor_queries=20,
                 degree_queries=60, total_queries=80, distance=2, eps_far=False, wall_time_s=0.25),
    ]
    summary = CellSummary(cell=0, family="disjoint-cycles", n=8, d=3, eps=0.25, planted=0, trials=2,
                          rejections=1, rejection_rate=0.5, ci_low=0.09, ci_high=0.91,
                          mean_queries=90.0, max_queries=100, mean_certificate_length=4.0)
    return RunReport(spec=spec, summaries=[summary], rows=rows)


class TestReportWriter:
    """Tests for ReportWriter class."""

    def setup_method(self):
        """Setup test fixtures."""
        self.temp_dir = Path(tempfile.mkdtemp())
        self.writer = ReportWriter(str(self.temp_dir / "out"))

    def test_write_report_files(self):
        """Test that summary.csv, trials.csv and report.json are written."""
        result = self.writer.write_report(make_report())

        assert result["cells"] == 1
        assert result["trials"] == 2
        assert result["rejections"] == 1
        assert self.writer.summary_path.exists()
        assert self.writer.trials_path.exists()
        assert self.writer.json_path.exists()

    def test_columns(self):
        """Test column order and that timing is excluded by default."""
        self.writer.write_report(make_report())

        summary = pd.read_csv(self.writer.summary_path)
        trials = pd.read_csv(self.writer.trials_path)
        assert list(summary.columns) == SUMMARY_COLUMNS
        assert list(trials.columns) == TRIAL_COLUMNS
        assert trials["outcome"].tolist() == ["REJECT", "ACCEPT"]

        payload = json.loads(self.writer.json_path.read_text(encoding="utf-8"))
        assert "wall_time_s" not in payload["trials"][0]
        assert payload["trials"][0]["certificate"] == [0, 1, 2, 3]

    def test_timing_from_spec(self):
        """Test that record_timing adds wall times."""
        self.writer.write_report(make_report(record_timing=True))

        trials = pd.read_csv(self.writer.trials_path)
        assert trials["wall_time_s"].tolist() == [0.5, 0.25]

    def test_repeat_is_byte_identical(self):
        """Test that writing the same report twice gives identical files."""
        report = make_report()
        self.writer.write_report(report)
        first = [p.read_bytes() for p in (self.writer.summary_path, self.writer.trials_path, self.writer.json_path)]

        self.writer.write_report(report)
        second = [p.read_bytes() for p in (self.writer.summary_path, self.writer.trials_path, self.writer.json_path)]

        assert first == second

    def test_write_scaling(self):
        """Test scaling.json next to the sweep files."""
        fit = ScalingFit(raw_exponent=0.61, corrected_exponent=0.5,
                         n_values=[8, 16], mean_queries=[90.0, 130.0])

        result = self.writer.write_scaling(make_report(), fit)

        data = json.loads((self.writer.output_dir / "scaling.json").read_text(encoding="utf-8"))
        assert data["raw_exponent"] == 0.61
        assert result["corrected_exponent"] == 0.5

    def test_export_error(self):
        """Test that write failures become ReportExportError."""
        with patch("pandas.DataFrame.to_csv", side_effect=OSError("disk full")):
            with pytest.raises(ReportExportError, match="disk full"):
                self.writer.write_report(make_report())

    def test_write_json_unserializable(self):
        """Test that non-JSON payloads raise ReportExportError."""
        with pytest.raises(ReportExportError):
            self.writer.write_json({"bad": object()}, self.temp_dir / "x.json")
