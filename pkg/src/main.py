"""Command-line entry point for the cycle-freeness tester."""

import functools
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

import click

from src.core.analysis import (
    blue_summary,
    check_dominant_forest,
    check_dominant_path_through_edge,
    check_no_bidirectional_dominance,
    classify_edges,
    recessive_report,
)
from src.core.errors import InvalidArgumentError, ResourceLimitError
from src.core.generators import build_instance, eps_key
from src.core.harness import powers_of_two, run_experiment, run_scaling
from src.core.report_writer import ReportExportError, ReportWriter
from src.core.tester import build_params, cycle_freeness_tester
from src.core.walks import format_walks, sample_walks
from src.models.experiment import ExperimentSpec, InstanceFamily, InstanceSpec
from src.models.graph import QueryMeter
from src.models.params import ParamMode
from src.utils.config import Config, load_config
from src.utils.graph_io import load_graph, read_metadata, save_graph, write_metadata
from src.utils.logger import (
    get_logger,
    log_error_with_context,
    log_function_result,
    setup_development_logger,
    setup_production_logger,
)
from src.utils.rng import make_rng
from src.utils.state_manager import StateManager
from src.utils.stats import required_samples

EXIT_INVALID = 1
EXIT_RESOURCE = 2

logger = get_logger(__name__)


class AppContext:
    """Global options shared by all subcommands."""

    def __init__(self, config: Config, seed: int, workers: int, out: Path) -> None:
        self.config = config
        self.seed = seed
        self.workers = workers
        self.out = out


def cli_errors(func):
    """Map package errors to exit codes: 1 invalid input, 2 resource limit."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ResourceLimitError as e:
            log_error_with_context(e, {"required": e.required})
            click.echo(f"ERROR: {e}", err=True)
            sys.exit(EXIT_RESOURCE)
        except (InvalidArgumentError, ReportExportError) as e:
            log_error_with_context(e)
            click.echo(f"ERROR: {e}", err=True)
            sys.exit(EXIT_INVALID)

    return wrapper


def _int_list(text: Optional[str]) -> Optional[List[int]]:
    if not text:
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InvalidArgumentError(f"Expected comma-separated vertex ids, got {text!r}")


@click.group()
@click.option('--seed', type=int, default=0, show_default=True, help='Base random seed')
@click.option('--workers', type=int, default=None, help='Worker processes for sweeps (default from config)')
@click.option('--out', type=click.Path(path_type=Path), default=None, help='Output directory (default from config)')
@click.option('--env-file', type=click.Path(exists=True, path_type=Path), default=None, help='Path to .env file')
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.option('--production', '-p', is_flag=True, help='Use production logging (JSON format)')
@click.pass_context
def cli(
    ctx: click.Context,
    seed: int,
    workers: Optional[int],
    out: Optional[Path],
    env_file: Optional[Path],
    verbose: bool,
    production: bool
) -> None:
    """Sublinear one-sided cycle-freeness tester for bounded-degree graphs."""
    try:
        config = load_config(env_file)
    except ValueError as e:
        click.echo(f"ERROR: {e}", err=True)
        sys.exit(EXIT_INVALID)

    if production:
        setup_production_logger(config.logs_dir)
    else:
        setup_development_logger(config.logs_dir, verbose=verbose)

    ctx.obj = AppContext(
        config=config,
        seed=seed,
        workers=workers if workers is not None else config.workers,
        out=out if out is not None else config.output_dir,
    )
    logger.debug("CLI started", seed=seed, workers=ctx.obj.workers, out=str(ctx.obj.out))


@cli.command()
@click.argument('family', type=click.Choice(InstanceFamily.ALL))
@click.argument('output', type=click.Path(path_type=Path))
@click.option('--n', 'n', type=int, required=True, help='Vertex count')
@click.option('--d', 'd', type=int, default=3, show_default=True, help='Degree bound')
@click.option('--eps', type=float, default=None, help='Cycle length 1/eps (disjoint-cycles)')
@click.option('--planted', type=int, default=0, show_default=True, help='Planted cycles')
@click.option('--regularity', type=int, default=None, help='Degree of well-connected instances')
@click.option('--label-eps', type=float, multiple=True, help='Record eps-far labels for these eps')
@click.pass_obj
@cli_errors
def gen(
    app: AppContext,
    family: str,
    output: Path,
    n: int,
    d: int,
    eps: Optional[float],
    planted: int,
    regularity: Optional[int],
    label_eps: Tuple[float, ...]
) -> None:
    """Generate an instance and write it with a metadata sidecar."""
    try:
        spec = InstanceSpec(
            family=family, n=n, d=d, seed=app.seed, eps=eps, planted=planted, regularity=regularity
        )
    except ValueError as e:
        raise InvalidArgumentError(str(e))
    instance = build_instance(spec, label_eps=label_eps)
    save_graph(instance.graph, output)
    meta_path = write_metadata(instance.metadata(), output)
    click.echo(f"Wrote {output} (n={instance.graph.n}, edges={instance.graph.edge_count}, distance={instance.distance})")
    click.echo(f"Metadata: {meta_path}")


@cli.command(name="test")
@click.argument('graph_path', type=click.Path(path_type=Path))
@click.option('--eps', type=float, required=True, help='Distance parameter')
@click.option('--mode', type=click.Choice(ParamMode.CHOICES), default=ParamMode.DESK, show_default=True)
@click.option('--ell', type=int, default=None, help='Override walk length')
@click.option('--m', 'm', type=int, default=None, help='Override walks per start')
@click.option('--num-starts', type=int, default=None, help='Override start vertex count')
@click.option('--report', type=click.Path(path_type=Path), default=None, help='JSON report path')
@click.pass_obj
@cli_errors
def test_command(
    app: AppContext,
    graph_path: Path,
    eps: float,
    mode: str,
    ell: Optional[int],
    m: Optional[int],
    num_starts: Optional[int],
    report: Optional[Path]
) -> None:
    """Run the cycle-freeness tester on a graph file."""
    graph = load_graph(graph_path)
    tester = app.config.tester
    params = build_params(
        graph.n, graph.d, eps, mode=mode,
        beta_ell=tester.beta_ell, beta_walks=tester.beta_walks, c=tester.c,
        cap_factor=tester.certificate_cap_factor, ell=ell, m=m, num_starts=num_starts,
    )

    started = time.perf_counter()
    verdict = cycle_freeness_tester(
        graph, eps, params, make_rng(app.seed), chunk_size=app.config.tester.walk_chunk_size
    )
    wall_time = time.perf_counter() - started
    log_function_result("cycle_freeness_tester", verdict.outcome, duration=wall_time, queries=verdict.meter.total)

    click.echo(f"Verdict: {verdict.outcome}")
    if verdict.certificate:
        click.echo(f"Certificate ({verdict.certificate.length} vertices): {verdict.certificate.cycle}")
    click.echo(f"Queries: {verdict.meter.total} (neighbor {verdict.meter.neighbor_queries}, degree {verdict.meter.degree_queries})")

    instance = read_metadata(graph_path)
    if instance is not None:
        line = f"Instance: {instance.get('family')} seed={instance.get('seed')}, distance {instance.get('distance')}"
        far = instance.get("eps_far", {}).get(eps_key(eps))
        if far is not None:
            line += f", eps-far at eps={eps_key(eps)}: {far}"
        click.echo(line)

    if report:
        payload = {
            "graph": str(graph_path),
            "params": params.model_dump(mode="json"),
            "verdict": verdict.outcome,
            "certificate": verdict.certificate.cycle if verdict.certificate else None,
            "queries": verdict.meter.model_dump(),
            "verification_queries": verdict.verification_meter.model_dump(),
            "wall_time_s": round(wall_time, 6),
            "starts": [start.model_dump() for start in verdict.starts],
            "instance": instance,
        }
        ReportWriter(report.parent).write_json(payload, report)
        click.echo(f"Report: {report}")


@cli.command()
@click.argument('graph_path', type=click.Path(path_type=Path))
@click.option('--start', type=int, default=0, show_default=True, help='Start vertex s')
@click.option('--alpha', type=float, required=True, help='Reach threshold')
@click.option('--ell', type=int, required=True, help='Walk length')
@click.option('--samples', type=int, default=None, help='Walks to sample (default: minimum for the confidence)')
@click.option('--heavy-samples', type=int, default=None, help='Partner walks for heavy/light split')
@click.option('--component', type=str, default=None, help='Comma-separated vertex set S')
@click.option('--eps', type=float, default=None, help='eps for the blue-vertex summary')
@click.option('--output', type=click.Path(path_type=Path), default=None, help='JSON output path')
@click.option('--dump-walks', type=click.Path(path_type=Path), default=None, help='Write sampled walks here')
@click.option('--dump-count', type=int, default=10, show_default=True, help='Walks to dump')
@click.pass_obj
@cli_errors
def analyze(
    app: AppContext,
    graph_path: Path,
    start: int,
    alpha: float,
    ell: int,
    samples: Optional[int],
    heavy_samples: Optional[int],
    component: Optional[str],
    eps: Optional[float],
    output: Optional[Path],
    dump_walks: Optional[Path],
    dump_count: int
) -> None:
    """Classify edges from a start vertex and run the dominance checks."""
    graph = load_graph(graph_path)
    confidence = app.config.analysis.confidence
    if not 0 < alpha < 1:
        raise InvalidArgumentError(f"Need 0 < alpha < 1, got {alpha}")
    if samples is None:
        samples = required_samples(alpha, confidence)
    if heavy_samples is None:
        heavy_samples = app.config.analysis.heavy_samples

    rng = make_rng(app.seed)
    cls = classify_edges(
        graph, start, alpha, ell, samples, rng, confidence,
        component=_int_list(component), heavy_samples=heavy_samples
    )
    checks = {
        "dominant_forest": check_dominant_forest(cls),
        "no_bidirectional_dominance": check_no_bidirectional_dominance(cls),
        "dominant_path_through_edge": check_dominant_path_through_edge(cls),
    }
    recessive = recessive_report(cls)

    click.echo(f"S: {len(cls.component)} vertices, special premise: {cls.special}")
    click.echo(f"Dominant edges: {len(cls.dominant_edges())}, recessive: {recessive.certain_recessive}, "
               f"uncertain: {len(cls.uncertain_edges())}")
    for name, result in checks.items():
        click.echo(f"{name}: {result.status}" + (f" ({result.message})" if result.message else ""))

    payload = {
        "graph": str(graph_path),
        "classification": cls.model_dump(mode="json"),
        "checks": {name: result.model_dump(mode="json") for name, result in checks.items()},
        "recessive": recessive.model_dump(mode="json"),
    }
    if eps is not None:
        payload["blue"] = blue_summary(cls, eps).model_dump(mode="json")

    output = output or app.out / "analysis.json"
    ReportWriter(output.parent).write_json(payload, output)
    click.echo(f"Analysis: {output}")

    if dump_walks:
        walks = sample_walks(graph, start, ell, dump_count, make_rng(app.seed), QueryMeter())
        dump_walks.parent.mkdir(parents=True, exist_ok=True)
        dump_walks.write_text(format_walks(walks.tolist()), encoding="utf-8")
        click.echo(f"Walks: {dump_walks}")


def _experiment_spec(app: AppContext, **fields) -> ExperimentSpec:
    tester = app.config.tester
    fields.setdefault("beta_ell", tester.beta_ell)
    fields.setdefault("beta_walks", tester.beta_walks)
    fields.setdefault("c", tester.c)
    fields.setdefault("cap_factor", tester.certificate_cap_factor)
    try:
        return ExperimentSpec(seed_base=app.seed, **fields)
    except ValueError as e:
        raise InvalidArgumentError(str(e))


@cli.command()
@click.option('--family', type=click.Choice(InstanceFamily.ALL), required=True)
@click.option('--n', 'n_values', type=int, multiple=True, required=True, help='Vertex counts (repeatable)')
@click.option('--d', 'd_values', type=int, multiple=True, default=(3,), show_default=True)
@click.option('--eps', 'eps_values', type=float, multiple=True, default=(0.1,), show_default=True)
@click.option('--planted', 'planted_values', type=int, multiple=True, default=(0,), show_default=True)
@click.option('--trials', type=int, default=10, show_default=True)
@click.option('--mode', type=click.Choice(ParamMode.CHOICES), default=ParamMode.DESK, show_default=True)
@click.option('--ell', type=int, default=None)
@click.option('--m', 'm', type=int, default=None)
@click.option('--num-starts', type=int, default=None)
@click.option('--timing', is_flag=True, help='Record wall times (reports are then not reproducible)')
@click.option('--resume', '-r', is_flag=True, help='Resume from a checkpoint in the output directory')
@click.pass_obj
@cli_errors
def sweep(
    app: AppContext,
    family: str,
    n_values: Tuple[int, ...],
    d_values: Tuple[int, ...],
    eps_values: Tuple[float, ...],
    planted_values: Tuple[int, ...],
    trials: int,
    mode: str,
    ell: Optional[int],
    m: Optional[int],
    num_starts: Optional[int],
    timing: bool,
    resume: bool
) -> None:
    """Detection-rate sweep over an instance grid."""
    spec = _experiment_spec(
        app, family=family, n_values=list(n_values), d_values=list(d_values),
        eps_values=list(eps_values), planted_values=list(planted_values), trials=trials,
        mode=mode, ell=ell, m=m, num_starts=num_starts, record_timing=timing,
    )
    state = StateManager(str(app.out / "sweep_state.json")) if resume else None
    report = run_experiment(
        spec, workers=app.workers, chunk_size=app.config.tester.walk_chunk_size, state_manager=state
    )
    ReportWriter(app.out).write_report(report)
    if state is not None:
        state.cleanup_state()

    for summary in report.summaries:
        click.echo(
            f"cell {summary.cell}: n={summary.n} d={summary.d} eps={summary.eps} planted={summary.planted} "
            f"rejected {summary.rejections}/{summary.trials} "
            f"[{summary.ci_low:.3f}, {summary.ci_high:.3f}] mean queries {summary.mean_queries:.0f}"
        )
    click.echo(f"Reports written to {app.out}")


@cli.command()
@click.option('--family', type=click.Choice(InstanceFamily.ALL), default=InstanceFamily.DISJOINT_CYCLES, show_default=True)
@click.option('--min-exp', type=int, default=10, show_default=True, help='Smallest n is 2**min_exp')
@click.option('--max-exp', type=int, default=16, show_default=True, help='Largest n is 2**max_exp')
@click.option('--d', 'd', type=int, default=2, show_default=True)
@click.option('--eps', type=float, default=0.1, show_default=True)
@click.option('--trials', type=int, default=5, show_default=True)
@click.pass_obj
@cli_errors
def scaling(
    app: AppContext,
    family: str,
    min_exp: int,
    max_exp: int,
    d: int,
    eps: float,
    trials: int
) -> None:
    """Measure query growth in n and fit its exponent."""
    spec = _experiment_spec(
        app, family=family, n_values=powers_of_two(min_exp, max_exp), d_values=[d],
        eps_values=[eps], trials=trials,
    )
    report, fit = run_scaling(spec, workers=app.workers, chunk_size=app.config.tester.walk_chunk_size)
    ReportWriter(app.out).write_scaling(report, fit)
    click.echo(f"Raw exponent: {fit.raw_exponent:.4f}")
    click.echo(f"Corrected exponent (queries / log2(n)^3): {fit.corrected_exponent:.4f}")
    click.echo(f"Reports written to {app.out}")


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
