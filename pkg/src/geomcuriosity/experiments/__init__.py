"""Simulation protocols, check suites, configuration and file output."""

from .checks import CheckResult, run_check_suite, run_oracle_suite
from .config import ExperimentConfig, GridSpec, OracleSpec
from .sims import GridResult, run_sim1, run_sim2

__all__ = ["CheckResult", "ExperimentConfig", "GridResult", "GridSpec", "OracleSpec",
           "run_check_suite", "run_oracle_suite", "run_sim1", "run_sim2"]
