"""Verification harness: configuration, check catalog, reports and the CLI."""

from .catalog import CHECKS, build_tasks, describe_check
from .config import ConfigError, RunConfig, apply_overrides, load_config
from .report import ReportRecord

__all__ = ["CHECKS", "ConfigError", "ReportRecord", "RunConfig", "apply_overrides",
           "build_tasks", "describe_check", "load_config", "run_suite"]


def run_suite(config, out=None, log=None):
    """See :func:`betaintertwine.harness.cli.run_suite`."""
    from .cli import run_suite as _run
    return _run(config, out=out, log=log)
