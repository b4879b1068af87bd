"""Tests for configuration module."""

import os
import pytest
from pathlib import Path
from unittest.mock import patch
from src.utils.config import AnalysisDefaults, Config, TesterDefaults, load_config


class TestTesterDefaults:
    """Tests for TesterDefaults model."""

    def test_tester_defaults(self):
        """Test default desk-scale constants."""
        defaults = TesterDefaults()
        assert defaults.beta_ell == 4.0
        assert defaults.beta_walks == 2.0
        assert defaults.c == 1.0
        assert defaults.certificate_cap_factor == 4
        assert defaults.walk_chunk_size == 65536

    def test_tester_defaults_reject_small_c(self):
        """Test that c below 1 is rejected."""
        with pytest.raises(ValueError):
            TesterDefaults(c=0.5)

    def test_tester_defaults_reject_nonpositive_beta(self):
        """Test that multipliers must be positive."""
        with pytest.raises(ValueError):
            TesterDefaults(beta_ell=0)


class TestConfig:
    """Tests for Config model."""

    def test_config_defaults(self):
        """Test creating config with default values."""
        config = Config()

        assert config.workers == 1
        assert config.output_dir == Path("output")
        assert config.logs_dir == Path("logs")
        assert config.analysis == AnalysisDefaults()
        assert config.analysis.confidence == 0.999

    def test_config_custom_paths(self):
        """Test creating config with custom paths."""
        config = Config(output_dir=Path("/custom/output"), logs_dir=Path("/custom/logs"), workers=4)

        assert config.output_dir == Path("/custom/output")
        assert config.logs_dir == Path("/custom/logs")
        assert config.workers == 4

    def test_config_rejects_zero_workers(self):
        """Test that at least one worker is required."""
        with pytest.raises(ValueError):
            Config(workers=0)


class TestLoadConfig:
    """Tests for load_config function."""

    @patch.dict(os.environ, {
        'CYCLETEST_BETA_ELL': '2.5',
        'CYCLETEST_BETA_WALKS': '1.5',
        'CYCLETEST_C': '3',
        'CYCLETEST_CERT_CAP_FACTOR': '6',
        'CYCLETEST_WALK_CHUNK': '1024',
        'CYCLETEST_EXACT_BUDGET': '1000',
        'CYCLETEST_CONFIDENCE': '0.99',
        'CYCLETEST_HEAVY_SAMPLES': '50',
        'CYCLETEST_WORKERS': '8',
        'CYCLETEST_OUTPUT_DIR': 'custom_output',
        'CYCLETEST_LOGS_DIR': 'custom_logs'
    })
    @patch('src.utils.config.load_dotenv')
    @patch('src.utils.config.Path.mkdir')
    def test_load_config_from_env(self, mock_mkdir, mock_load_dotenv):
        """Test loading configuration from environment variables."""
        config = load_config(create_dirs=True)

        # Tester constants
        assert config.tester.beta_ell == 2.5
        assert config.tester.beta_walks == 1.5
        assert config.tester.c == 3.0
        assert config.tester.certificate_cap_factor == 6
        assert config.tester.walk_chunk_size == 1024

        # Analysis constants
        assert config.analysis.exact_budget == 1000
        assert config.analysis.confidence == 0.99
        assert config.analysis.heavy_samples == 50

        assert config.workers == 8
        assert config.output_dir == Path('custom_output')
        assert config.logs_dir == Path('custom_logs')

        # Output and logs directories
        assert mock_mkdir.call_count == 2

    @patch.dict(os.environ, {'CYCLETEST_WORKERS': 'many'})
    @patch('src.utils.config.load_dotenv')
    def test_load_config_invalid_values(self, mock_load_dotenv):
        """Test that unparsable environment values raise ValueError."""
        with pytest.raises(ValueError, match="Invalid configuration"):
            load_config()

    @patch.dict(os.environ, {'CYCLETEST_CONFIDENCE': '1.5'})
    @patch('src.utils.config.load_dotenv')
    def test_load_config_out_of_range(self, mock_load_dotenv):
        """Test that out-of-range values raise ValueError."""
        with pytest.raises(ValueError, match="Invalid configuration"):
            load_config()

    @patch.dict(os.environ, {}, clear=True)
    @patch('src.utils.config.load_dotenv')
    @patch('src.utils.config.Path.mkdir')
    def test_load_config_defaults(self, mock_mkdir, mock_load_dotenv):
        """Test loading configuration with default values."""
        config = load_config()

        assert config.tester == TesterDefaults()
        assert config.analysis == AnalysisDefaults()
        assert config.workers == 1
        assert config.output_dir == Path('output')
        assert config.logs_dir == Path('logs')
        mock_mkdir.assert_not_called()

    @patch('src.utils.config.load_dotenv')
    def test_load_config_with_env_file(self, mock_load_dotenv):
        """Test loading configuration with .env file."""
        env_file = Path('.env.test')
        load_config(env_file)

        mock_load_dotenv.assert_called_once_with(env_file)

    @patch('src.utils.config.load_dotenv')
    def test_load_config_without_env_file(self, mock_load_dotenv):
        """Test loading configuration without specifying .env file."""
        load_config()

        mock_load_dotenv.assert_called_once_with()
