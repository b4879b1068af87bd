"""Configuration management module."""

from typing import Optional
from pathlib import Path
from pydantic import BaseModel, Field
from dotenv import load_dotenv
import os


class TesterDefaults(BaseModel):
    """Default constants for the desk-scale parameter schedule."""
    beta_ell: float = Field(default=4.0, gt=0, description="Walk length multiplier (desk-scale)")
    beta_walks: float = Field(default=2.0, gt=0, description="Walk count multiplier (desk-scale)")
    c: float = Field(default=1.0, ge=1.0, description="Global constant for num_starts and the asymptotic schedule")
    certificate_cap_factor: int = Field(default=4, ge=1, description="Certificate length cap as a multiple of ell")
    walk_chunk_size: int = Field(default=65536, ge=1, description="Walks simulated per vectorised batch")


class AnalysisDefaults(BaseModel):
    """Defaults for the exact and statistical analysis oracles."""
    exact_budget: int = Field(default=50_000_000, ge=1, description="Max targets*n*ell*d work per exact reach DP")
    confidence: float = Field(default=0.999, gt=0.5, lt=1.0, description="Confidence level of label intervals")
    heavy_samples: int = Field(default=0, ge=0, description="Partner walks per footprint for cyc estimates (0 disables)")


class Config(BaseModel):
    """Application configuration."""
    tester: TesterDefaults = Field(default_factory=TesterDefaults)
    analysis: AnalysisDefaults = Field(default_factory=AnalysisDefaults)
    workers: int = Field(default=1, ge=1, description="Worker processes for experiment trials")
    output_dir: Path = Field(default=Path("output"), description="Output directory")
    logs_dir: Path = Field(default=Path("logs"), description="Logs directory")


def load_config(env_file: Optional[Path] = None, create_dirs: bool = False) -> Config:
    """Load configuration from environment variables.

    Args:
        env_file: Optional path to .env file
        create_dirs: Create output and logs directories

    Returns:
        Configuration object

    Raises:
        ValueError: If a variable cannot be parsed or is out of range
    """
    if env_file:
        load_dotenv(env_file)
    else:
        load_dotenv()

    try:
        tester = TesterDefaults(
            beta_ell=float(os.getenv("CYCLETEST_BETA_ELL", "4.0")),
            beta_walks=float(os.getenv("CYCLETEST_BETA_WALKS", "2.0")),
            c=float(os.getenv("CYCLETEST_C", "1.0")),
            certificate_cap_factor=int(os.getenv("CYCLETEST_CERT_CAP_FACTOR", "4")),
            walk_chunk_size=int(os.getenv("CYCLETEST_WALK_CHUNK", "65536")),
        )
        analysis = AnalysisDefaults(
            exact_budget=int(os.getenv("CYCLETEST_EXACT_BUDGET", "50000000")),
            confidence=float(os.getenv("CYCLETEST_CONFIDENCE", "0.999")),
            heavy_samples=int(os.getenv("CYCLETEST_HEAVY_SAMPLES", "0")),
        )
        config = Config(
            tester=tester,
            analysis=analysis,
            workers=int(os.getenv("CYCLETEST_WORKERS", "1")),
            output_dir=Path(os.getenv("CYCLETEST_OUTPUT_DIR", "output")),
            logs_dir=Path(os.getenv("CYCLETEST_LOGS_DIR", "logs")),
        )
    except (ValueError, TypeError) as e:
        raise ValueError(f"Invalid configuration: {e}")

    if create_dirs:
        config.output_dir.mkdir(exist_ok=True, parents=True)
        config.logs_dir.mkdir(exist_ok=True, parents=True)

    return config
