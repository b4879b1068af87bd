"""CSV and JSON export of experiment reports."""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from src.models.experiment import RunReport, ScalingFit
from src.utils.logger import get_logger

logger = get_logger(__name__)

SUMMARY_COLUMNS = [
    "cell", "family", "n", "d", "eps", "planted", "trials", "rejections", "rejection_rate",
    "ci_low", "ci_high", "mean_queries", "max_queries", "mean_certificate_length",
]
TRIAL_COLUMNS = [
    "cell", "trial", "seed", "n", "outcome", "certificate_length", "certificate_valid",
    "neighbor_queries", "degree_queries", "total_queries", "distance", "eps_far",
]
TIMING_COLUMN = "wall_time_s"


class ReportExportError(Exception):
    """Custom exception for report export errors."""
    pass


class ReportWriter:
    """Writes summary.csv, trials.csv and report.json into one output directory."""

    def __init__(self, output_dir: str, encoding: str = "utf-8") -> None:
        self.output_dir = Path(output_dir)
        self.encoding = encoding
        logger.info(f"ReportWriter initialized with output directory: {self.output_dir}")

    @property
    def summary_path(self) -> Path:
        return self.output_dir / "summary.csv"

    @property
    def trials_path(self) -> Path:
        return self.output_dir / "trials.csv"

    @property
    def json_path(self) -> Path:
        return self.output_dir / "report.json"

    def summary_frame(self, report: RunReport) -> pd.DataFrame:
        rows = [summary.model_dump() for summary in report.summaries]
        return pd.DataFrame(rows).reindex(columns=SUMMARY_COLUMNS)

    def trials_frame(self, report: RunReport, include_timing: bool = False) -> pd.DataFrame:
        columns = TRIAL_COLUMNS + ([TIMING_COLUMN] if include_timing else [])
        rows = [row.model_dump() for row in report.rows]
        return pd.DataFrame(rows).reindex(columns=columns)

    def write_report(self, report: RunReport, include_timing: Optional[bool] = None) -> Dict[str, Any]:
        """Write all three report files.

        Args:
            report: Finished sweep
            include_timing: Add wall_time_s; defaults to report.spec.record_timing

        Returns:
            Dictionary with export summary

        Raises:
            ReportExportError: If a file cannot be written
        """
        if include_timing is None:
            include_timing = report.spec.record_timing
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            self._write_frame(self.summary_frame(report), self.summary_path)
            self._write_frame(self.trials_frame(report, include_timing), self.trials_path)
            self.write_json(self._report_payload(report, include_timing), self.json_path)
        except (OSError, ValueError) as e:
            error_msg = f"Failed to export report: {e}"
            logger.error(error_msg, output_dir=str(self.output_dir))
            raise ReportExportError(error_msg) from e

        summary = {
            "output_dir": str(self.output_dir),
            "cells": len(report.summaries),
            "trials": len(report.rows),
            "rejections": sum(s.rejections for s in report.summaries),
        }
        logger.info("Report export completed successfully", **summary)
        return summary

    def _report_payload(self, report: RunReport, include_timing: bool) -> Dict[str, Any]:
        exclude = None if include_timing else {TIMING_COLUMN}
        return {
            "spec": report.spec.model_dump(mode="json"),
            "summary": [s.model_dump(mode="json") for s in report.summaries],
            "trials": [row.model_dump(mode="json", exclude=exclude) for row in report.rows],
        }

    def _write_frame(self, df: pd.DataFrame, path: Path) -> None:
        df.to_csv(
            path,
            index=False,
            encoding=self.encoding,
            quoting=csv.QUOTE_MINIMAL,
            na_rep="",
            lineterminator="\n",
        )
        logger.debug(f"CSV file written successfully: {path}")

    def write_json(self, payload: Dict[str, Any], path: Path) -> Path:
        """Write a JSON document with stable formatting.

        Raises:
            ReportExportError: If the file cannot be written
        """
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(payload, indent=2) + "\n", encoding=self.encoding)
        except (OSError, TypeError) as e:
            raise ReportExportError(f"Failed to write {path}: {e}") from e
        logger.debug(f"JSON written to {path}")
        return path

    def write_scaling(self, report: RunReport, fit: ScalingFit) -> Dict[str, Any]:
        """Sweep files plus scaling.json with both fitted exponents."""
        summary = self.write_report(report)
        self.write_json(fit.model_dump(mode="json"), self.output_dir / "scaling.json")
        summary["raw_exponent"] = fit.raw_exponent
        summary["corrected_exponent"] = fit.corrected_exponent
        return summary
