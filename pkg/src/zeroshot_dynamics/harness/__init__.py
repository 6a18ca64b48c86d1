"""Benchmark configuration, protocols, scoring and reports."""

from .config import BenchmarkConfig, ConfigError, load_config
from .runners import BenchmarkReport, run_benchmark, run_imputation_benchmark, run_mjp_benchmark, run_tpp_benchmark
from .scoring import imputation_fitness, score_predictions, tpp_fitness

__all__ = [
    "BenchmarkConfig",
    "ConfigError",
    "load_config",
    "BenchmarkReport",
    "run_benchmark",
    "run_imputation_benchmark",
    "run_mjp_benchmark",
    "run_tpp_benchmark",
    "imputation_fitness",
    "score_predictions",
    "tpp_fitness",
]
