"""Batch driver for the verification suites."""
from .config import ConfigError, SuiteConfig, load_config
from .main import main
from .report import Report
from .runner import run_suite

__all__ = ["ConfigError", "Report", "SuiteConfig", "load_config", "main", "run_suite"]
