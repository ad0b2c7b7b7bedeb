"""Verification suites, the property matrix, report formats and the CLI."""

from .config import DEFAULTS, DEFAULTS_VERSION, RunConfig, threads_from_env
from .report import dumps, envelope, load_schema
from .suites import SUITES, Context, SuiteReport, resolve, run_many, run_suite
from .table1 import table1_report

__all__ = [
    "DEFAULTS", "DEFAULTS_VERSION", "SUITES", "Context", "RunConfig", "SuiteReport",
    "dumps", "envelope", "load_schema", "resolve", "run_many", "run_suite",
    "table1_report", "threads_from_env",
]
