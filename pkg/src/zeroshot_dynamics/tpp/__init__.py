"""Marked temporal point process prediction and evaluation."""

from .estimator import NextEventPredictor
from .heuristics import (
    EvilContextStats,
    SyntheticPriorContextStats,
    build_context_stats_evil,
    build_context_stats_sp,
    predict_next_evil,
    predict_next_sp,
    rollout_horizon,
)
from .metrics import TppMetricReport, accuracy, evaluate_forecasts, otd, rmse_counts, rmse_dt, smape_dt

__all__ = [
    "NextEventPredictor",
    "EvilContextStats",
    "SyntheticPriorContextStats",
    "build_context_stats_evil",
    "build_context_stats_sp",
    "predict_next_evil",
    "predict_next_sp",
    "rollout_horizon",
    "TppMetricReport",
    "accuracy",
    "evaluate_forecasts",
    "otd",
    "rmse_counts",
    "rmse_dt",
    "smape_dt",
]
