"""Minority-game simulation of energy-efficient edge-server activation."""

__version__ = "0.1.0"

from .errors import ConfigurationError, TraceAuditError
from .game import (ActionId, GameConfig, GameTrace, RoundOutcome, WinHistory, assign_rewards,
                   audit_trace, determine_winner, play_round, run_batch, run_game)
from .harness import (DEFAULT_SWEEP, REFERENCE_GRID, ExperimentConfig, ExperimentReport,
                      compare_policies, derive_seed, run_experiment, sweep_alpha)
from .metrics import TaskModel, average_utility, evaluate, qoe_probability, volatility
from .policies import PolicySpec, parse_policy

__all__ = [
    "ActionId", "ConfigurationError", "DEFAULT_SWEEP", "ExperimentConfig", "ExperimentReport",
    "GameConfig", "GameTrace", "REFERENCE_GRID", "PolicySpec", "RoundOutcome", "TaskModel",
    "TraceAuditError", "WinHistory", "assign_rewards", "audit_trace", "average_utility",
    "compare_policies", "derive_seed", "determine_winner", "evaluate", "parse_policy",
    "play_round", "qoe_probability", "run_batch", "run_experiment", "run_game", "sweep_alpha",
    "volatility",
]
