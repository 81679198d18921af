"""Adaptive recoding and intrablock interleaving for batched network coding over burst-loss links."""

from .config import ConfigError, ExperimentConfig, Scheme, load_config, preset
from .expected_rank import expected_rank, expected_rank_curve, reception_distribution
from .ge_channel import (
    ChannelError,
    DegenerateModelError,
    GEModel,
    InfeasibleStatisticsError,
    NegativeEigenvalueError,
    abel,
    fit_from_stats,
    loss_rate,
    matrix_power,
    sample_losses,
    stationary,
)
from .interleaver import (
    ALL_OBJECTIVES,
    DispersionObjective,
    Scope,
    approximate_sequence,
    block_sequence,
    dispersion,
    fine_tune,
    worst_sequence,
)
from .recoding import greedy_allocate, joint_optimize
from .search import AnnealParams, SearchSpaceExceeded, exhaustive_optimum, simulated_annealing
from .simulator import ThroughputReport, run_experiment, simulate_block_hop

__version__ = "0.1.0"

__all__ = [
    "ALL_OBJECTIVES",
    "AnnealParams",
    "ChannelError",
    "ConfigError",
    "DegenerateModelError",
    "DispersionObjective",
    "ExperimentConfig",
    "GEModel",
    "InfeasibleStatisticsError",
    "NegativeEigenvalueError",
    "Scheme",
    "Scope",
    "SearchSpaceExceeded",
    "ThroughputReport",
    "abel",
    "approximate_sequence",
    "block_sequence",
    "dispersion",
    "exhaustive_optimum",
    "expected_rank",
    "expected_rank_curve",
    "fine_tune",
    "fit_from_stats",
    "greedy_allocate",
    "joint_optimize",
    "load_config",
    "loss_rate",
    "matrix_power",
    "preset",
    "reception_distribution",
    "run_experiment",
    "sample_losses",
    "simulate_block_hop",
    "simulated_annealing",
    "stationary",
    "worst_sequence",
]
