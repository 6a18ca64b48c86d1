"""Markov jump processes: estimation, simulation and distribution metrics."""

from .estimation import (
    DegenerateGeneratorError,
    MjpEstimate,
    MjpRateEstimator,
    cross_entropy,
    estimate_mjp_parameters,
    extract_dfr_parameters,
    mjp_fitness,
    offdiag_rmse,
)
from .metrics import HellingerReport, hellinger, state_histograms, time_averaged_hellinger
from .simulation import (
    InfiniteEntropyProductionError,
    NonUniqueStationaryError,
    Trajectory,
    dfr_generator,
    entropy_production_rate,
    gillespie_sample,
    master_equation_solve,
    mean_first_passage_times,
    observe_on_grid,
    relaxation_times,
    sample_on_grid,
    stationary_distribution,
    total_entropy_production,
)
from .synthetic import DfrConfig, SyntheticMjpConfig, generate_synthetic_mjp, simulate_dfr_dataset

__all__ = [
    "DegenerateGeneratorError",
    "MjpEstimate",
    "MjpRateEstimator",
    "cross_entropy",
    "estimate_mjp_parameters",
    "extract_dfr_parameters",
    "mjp_fitness",
    "offdiag_rmse",
    "HellingerReport",
    "hellinger",
    "state_histograms",
    "time_averaged_hellinger",
    "InfiniteEntropyProductionError",
    "NonUniqueStationaryError",
    "Trajectory",
    "dfr_generator",
    "entropy_production_rate",
    "gillespie_sample",
    "master_equation_solve",
    "mean_first_passage_times",
    "observe_on_grid",
    "relaxation_times",
    "sample_on_grid",
    "stationary_distribution",
    "total_entropy_production",
    "DfrConfig",
    "SyntheticMjpConfig",
    "generate_synthetic_mjp",
    "simulate_dfr_dataset",
]
