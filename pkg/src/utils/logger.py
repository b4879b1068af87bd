"""Logging configuration module."""

import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

from loguru import logger

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{extra[name]}</cyan> | "
    "<level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} | {message} | {extra}"


def setup_logger(
    logs_dir: Path = Path("logs"),
    log_level: str = "INFO",
    json_file: bool = False,
    rotation: str = "50 MB",
    retention: str = "14 days",
) -> None:
    """Console sink on stderr plus a daily run log and an error log under logs_dir.

    File sinks are enqueued so sweep worker processes can share them.

    Args:
        logs_dir: Directory for log files
        log_level: Level of the console and run-log sinks
        json_file: Serialize the run log as JSON lines (one record per trial event)
        rotation: Size at which a log file is rotated
        retention: How long rotated files are kept
    """
    logger.remove()
    logger.configure(extra={"name": "cycletest"})

    # stdout carries verdicts and summaries, so logs go to stderr
    logger.add(sys.stderr, level=log_level, format=CONSOLE_FORMAT, colorize=True, diagnose=False)

    logs_dir.mkdir(exist_ok=True, parents=True)
    stamp = datetime.now().strftime("%Y%m%d")
    suffix = "jsonl" if json_file else "log"
    logger.add(
        logs_dir / f"cycletest_{stamp}.{suffix}",
        level=log_level,
        format=FILE_FORMAT,
        serialize=json_file,
        rotation=rotation,
        retention=retention,
        enqueue=True,
        diagnose=False,
    )
    logger.add(
        logs_dir / f"cycletest_errors_{stamp}.log",
        level="ERROR",
        format=FILE_FORMAT + " | {exception}",
        rotation=rotation,
        retention=retention,
        enqueue=True,
        backtrace=True,
        diagnose=False,
    )

    logger.info("Logger initialized", level=log_level, json_file=json_file, logs_dir=str(logs_dir))


def get_logger(name: str):
    """Module logger; `name` shows up in the console line."""
    return logger.bind(name=name)


def setup_production_logger(logs_dir: Path = Path("logs")) -> None:
    """Long sweeps: JSON run log, kept longer."""
    setup_logger(logs_dir=logs_dir, log_level="INFO", json_file=True, rotation="200 MB", retention="60 days")


def setup_development_logger(logs_dir: Path = Path("logs"), verbose: bool = False) -> None:
    """Interactive runs: plain-text run log, DEBUG with --verbose."""
    setup_logger(logs_dir=logs_dir, log_level="DEBUG" if verbose else "INFO")


def log_function_result(func_name: str, result: str, duration: Optional[float] = None, **context) -> None:
    """Log the outcome of a timed top-level call (e.g. a tester verdict)."""
    fields = dict(context, function=func_name, result=result)
    if duration is not None:
        fields["duration_seconds"] = round(duration, 4)
    logger.bind(**fields).info("{} -> {}", func_name, result)


def log_trial_progress(done: int, total: int) -> None:
    """Sweep progress: finished trials (resumed ones included) out of the grid total."""
    percentage = round(done / total * 100, 1) if total > 0 else 0.0
    logger.bind(done=done, total=total, percentage=percentage).info("Trials {}/{} ({}%)", done, total, percentage)


def log_error_with_context(error: Exception, context: Optional[dict] = None) -> None:
    """Log a package error the CLI is about to turn into an exit code.

    The message is passed positionally: validation errors quote their input
    with braces, which must not be read as format fields.
    """
    fields = {"error_type": type(error).__name__}
    fields.update(context or {})
    logger.bind(**fields).error("{}: {}", type(error).__name__, error)
