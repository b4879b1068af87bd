"""Experiment runner: detection-rate sweeps and query-scaling fits.

A sweep expands an ExperimentSpec into grid cells and runs `trials` tester
runs per cell, each on a freshly generated instance. Trials are independent
and may run in worker processes; rows are always reduced in (cell, trial)
order, so a report depends only on the ExperimentSpec.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from src.core.errors import InvalidArgumentError, TesterInvariantError
from src.core.generators import build_instance, eps_key
from src.core.tester import build_params, cycle_freeness_tester, verify_certificate
from src.models.experiment import (
    CellSummary,
    ExperimentCell,
    ExperimentSpec,
    InstanceFamily,
    InstanceSpec,
    RunReport,
    ScalingFit,
    TrialRow,
)
from src.models.params import TesterParams
from src.utils.logger import get_logger, log_trial_progress
from src.utils.rng import trial_rng, trial_seed
from src.utils.state_manager import StateManager
from src.utils.stats import wilson_interval

logger = get_logger(__name__)

MIN_SCALING_POINTS = 5
MIN_SCALING_RATIO = 64
REPORT_CONFIDENCE = 0.95


def make_params(spec: ExperimentSpec, cell: ExperimentCell) -> TesterParams:
    """Tester schedule of one cell, with explicit ell, m and num_starts overrides applied."""
    return build_params(
        cell.n, cell.d, cell.eps, mode=spec.mode,
        beta_ell=spec.beta_ell, beta_walks=spec.beta_walks, c=spec.c, cap_factor=spec.cap_factor,
        ell=spec.ell, m=spec.m, num_starts=spec.num_starts,
    )


def instance_spec(spec: ExperimentSpec, cell: ExperimentCell, trial: int) -> InstanceSpec:
    return InstanceSpec(
        family=cell.family,
        n=cell.n,
        d=cell.d,
        seed=trial_seed(spec.seed_base, trial),
        eps=cell.eps if cell.family == InstanceFamily.DISJOINT_CYCLES else None,
        planted=cell.planted,
    )


def run_trial(spec: ExperimentSpec, cell: ExperimentCell, trial: int, chunk_size: int = 65536) -> TrialRow:
    """Generate the trial's instance, run the tester on it and re-verify any certificate.

    Raises:
        TesterInvariantError: If a REJECT certificate fails re-verification
    """
    started = time.perf_counter()
    instance = build_instance(instance_spec(spec, cell, trial), label_eps=[cell.eps])
    params = make_params(spec, cell)
    seed = trial_seed(spec.seed_base, trial)

    verdict = cycle_freeness_tester(
        instance.graph, cell.eps, params, trial_rng(seed, cell.index), chunk_size=chunk_size
    )
    valid = None
    if verdict.rejected:
        valid = verify_certificate(instance.graph, verdict.certificate)
        if not valid:
            raise TesterInvariantError(
                f"Cell {cell.index} trial {trial}: certificate {verdict.certificate.cycle} does not verify"
            )

    return TrialRow(
        cell=cell.index,
        trial=trial,
        seed=seed,
        n=cell.n,
        outcome=verdict.outcome,
        certificate_length=verdict.certificate.length if verdict.rejected else None,
        certificate_valid=valid,
        neighbor_queries=verdict.meter.neighbor_queries,
        degree_queries=verdict.meter.degree_queries,
        total_queries=verdict.meter.total,
        distance=instance.distance,
        eps_far=instance.eps_far[eps_key(cell.eps)],
        certificate=verdict.certificate.cycle if verdict.rejected else None,
        wall_time_s=round(time.perf_counter() - started, 6) if spec.record_timing else None,
    )


def _run_task(task: Tuple[ExperimentSpec, ExperimentCell, int, int]) -> TrialRow:
    spec, cell, trial, chunk_size = task
    return run_trial(spec, cell, trial, chunk_size)


def summarize_cell(cell: ExperimentCell, rows: Sequence[TrialRow]) -> CellSummary:
    """Rejection rate with a 95% Wilson interval and query/certificate aggregates."""
    trials = len(rows)
    rejections = sum(1 for row in rows if row.certificate_length is not None)
    low, high = wilson_interval(rejections, trials, REPORT_CONFIDENCE)
    lengths = [row.certificate_length for row in rows if row.certificate_length is not None]
    queries = [row.total_queries for row in rows]
    return CellSummary(
        cell=cell.index,
        family=cell.family,
        n=cell.n,
        d=cell.d,
        eps=cell.eps,
        planted=cell.planted,
        trials=trials,
        rejections=rejections,
        rejection_rate=rejections / trials if trials else 0.0,
        ci_low=low,
        ci_high=high,
        mean_queries=float(np.mean(queries)) if queries else 0.0,
        max_queries=max(queries) if queries else 0,
        mean_certificate_length=float(np.mean(lengths)) if lengths else None,
    )


def run_experiment(
    spec: ExperimentSpec,
    workers: int = 1,
    chunk_size: int = 65536,
    state_manager: Optional[StateManager] = None,
    progress: bool = True
) -> RunReport:
    """Execute every (cell, trial) of the grid and aggregate per cell.

    With a state_manager, finished rows are checkpointed in batches of its
    save_every (and once more on exit, errors included); rows already in a
    matching checkpoint are not rerun.
    """
    cells = spec.cells()
    tasks = [(spec, cell, trial, chunk_size) for cell in cells for trial in range(spec.trials)]
    spec_hash = spec.spec_hash()

    done = {}
    if state_manager is not None:
        if state_manager.can_resume(spec_hash):
            done = state_manager.completed_rows()
            logger.info("Resuming sweep", **state_manager.get_processing_summary())
        else:
            state_manager.initialize_state(spec_hash, len(tasks))

    pending = [task for task in tasks if (task[1].index, task[2]) not in done]
    logger.info(
        f"Running sweep over {len(cells)} cells",
        family=spec.family, trials=len(tasks), pending=len(pending), workers=workers
    )

    def finished(row: TrialRow) -> None:
        done[(row.cell, row.trial)] = row
        if state_manager is not None:
            state_manager.record_trial(row)

    try:
        with tqdm(total=len(tasks), initial=len(tasks) - len(pending), desc="Trials", disable=not progress) as pbar:
            if workers > 1 and len(pending) > 1:
                with ProcessPoolExecutor(max_workers=workers) as executor:
                    for row in executor.map(_run_task, pending):
                        finished(row)
                        pbar.update(1)
            else:
                for task in pending:
                    finished(_run_task(task))
                    pbar.update(1)
    finally:
        if state_manager is not None:
            state_manager.flush()
    log_trial_progress(len(done), len(tasks))

    rows = [done[(cell.index, trial)] for cell in cells for trial in range(spec.trials)]
    summaries = [summarize_cell(cell, [row for row in rows if row.cell == cell.index]) for cell in cells]
    for summary in summaries:
        logger.info(
            f"Cell {summary.cell}: {summary.rejections}/{summary.trials} rejected",
            n=summary.n, d=summary.d, eps=summary.eps, planted=summary.planted,
            ci_low=round(summary.ci_low, 4), ci_high=round(summary.ci_high, 4),
        )
    return RunReport(spec=spec, summaries=summaries, rows=rows)


def scaling_fit(n_values: Iterable[int], mean_queries: Iterable[float]) -> ScalingFit:
    """Least-squares slope of log(queries) against log(n), raw and after dividing by log2(n)^3.

    Raises:
        InvalidArgumentError: If fewer than 5 distinct n are given or max/min n < 64
    """
    ns = np.asarray(list(n_values), dtype=float)
    queries = np.asarray(list(mean_queries), dtype=float)
    if ns.shape != queries.shape:
        raise InvalidArgumentError("n_values and mean_queries must have the same length")
    distinct = np.unique(ns)
    if distinct.size < MIN_SCALING_POINTS or distinct.min() * MIN_SCALING_RATIO > distinct.max():
        raise InvalidArgumentError(
            f"Scaling fit needs >= {MIN_SCALING_POINTS} distinct n spanning a ratio >= {MIN_SCALING_RATIO}"
        )
    if np.any(distinct < 2) or np.any(queries <= 0):
        raise InvalidArgumentError("Scaling fit needs n >= 2 and positive query counts")

    log_n = np.log(ns)
    raw = np.polyfit(log_n, np.log(queries), 1)[0]
    corrected = np.polyfit(log_n, np.log(queries / np.log2(ns) ** 3), 1)[0]
    return ScalingFit(
        raw_exponent=float(raw),
        corrected_exponent=float(corrected),
        n_values=[int(n) for n in ns],
        mean_queries=[float(q) for q in queries],
    )


def fit_report(report: RunReport) -> ScalingFit:
    """scaling_fit over a report, averaging mean queries of all cells sharing an n."""
    by_n = {}
    for summary in report.summaries:
        by_n.setdefault(summary.n, []).append(summary.mean_queries)
    ns = sorted(by_n)
    return scaling_fit(ns, [float(np.mean(by_n[n])) for n in ns])


def run_scaling(
    spec: ExperimentSpec,
    workers: int = 1,
    chunk_size: int = 65536,
    progress: bool = True
) -> Tuple[RunReport, ScalingFit]:
    """Run a sweep over spec.n_values and fit its query growth."""
    if len(set(spec.n_values)) < MIN_SCALING_POINTS:
        raise InvalidArgumentError(f"Scaling needs >= {MIN_SCALING_POINTS} distinct n values")
    report = run_experiment(spec, workers=workers, chunk_size=chunk_size, progress=progress)
    fit = fit_report(report)
    logger.info(
        "Scaling fit",
        raw_exponent=round(fit.raw_exponent, 4),
        corrected_exponent=round(fit.corrected_exponent, 4),
        points=len(fit.n_values),
    )
    return report, fit


def powers_of_two(low: int, high: int) -> List[int]:
    """[2**low, ..., 2**high]."""
    if low > high:
        raise InvalidArgumentError(f"Empty exponent range {low}..{high}")
    return [2 ** k for k in range(low, high + 1)]
