"""Scenario files, budgets, run orchestration and the ``tess-sim`` command."""
from .budget import BudgetModel, BudgetReport, MassEntry, PowerEntry, validate_budget
from .config import ScenarioConfig, emit_config, load_config, load_config_file
from .runner import ComparisonReport, RunResult, run_comparison, run_scenario, sweep
from .summary import RunSummary, SensorSummary, compute_summary, series_from_csv, series_to_csv

__all__ = [
    "BudgetModel",
    "BudgetReport",
    "ComparisonReport",
    "MassEntry",
    "PowerEntry",
    "RunResult",
    "RunSummary",
    "ScenarioConfig",
    "SensorSummary",
    "compute_summary",
    "emit_config",
    "load_config",
    "load_config_file",
    "run_comparison",
    "run_scenario",
    "series_from_csv",
    "series_to_csv",
    "sweep",
    "validate_budget",
]
