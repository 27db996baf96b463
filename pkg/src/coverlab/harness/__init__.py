"""Trial engine, acceptance battery, lower-bound experiments and CLI."""
from .experiments import ExperimentConfig, replay_trial, run_experiment
from .lowerbounds import add_points_experiment, ternary_lower_bound_experiment
from .report import COLUMNS, TrialReport, TrialRow, emit, load
from .stats import CONFIDENCE, hoeffding_check, hoeffding_slack

__all__ = [
    "ExperimentConfig", "run_experiment", "replay_trial", "add_points_experiment",
    "ternary_lower_bound_experiment", "COLUMNS", "TrialReport", "TrialRow", "emit", "load",
    "CONFIDENCE", "hoeffding_check", "hoeffding_slack",
]
