"""Hybrid imputer: motif retrieval for long gaps, time-aware interpolation for the rest."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from sklearn.base import BaseEstimator, TransformerMixin

from .core import TimeSeriesPanel, as_generator

__all__ = [
    "MissingBlock",
    "ImputerConfig",
    "MotifImputer",
    "detect_missing_blocks",
    "impute_channel",
    "impute_panel",
    "make_pointwise_mask",
    "make_window_mask",
    "mae_on_mask",
]


@dataclass(frozen=True)
class MissingBlock:
    start: int
    end: int  # exclusive

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class ImputerConfig:
    large_gap_threshold: int = 4
    context_size: int = 8

    def __post_init__(self):
        if self.large_gap_threshold < 1 or self.context_size < 1:
            raise ValueError("large_gap_threshold and context_size must be >= 1")


def detect_missing_blocks(missing) -> list[MissingBlock]:
    """Maximal runs of ``True`` as half-open ``[start, end)`` ranges."""
    missing = np.asarray(missing, dtype=bool)
    padded = np.concatenate(([False], missing, [False]))
    starts = np.flatnonzero(padded[1:] & ~padded[:-1])
    ends = np.flatnonzero(~padded[1:] & padded[:-1])
    return [MissingBlock(int(s), int(e)) for s, e in zip(starts, ends)]


def _motif_fill(out: np.ndarray, valid: np.ndarray, block: MissingBlock, ctx: int) -> bool:
    s, e = block.start, block.end
    gap_len = e - s
    context = out[s - ctx : s]
    if not np.all(np.isfinite(context)):
        return False
    req_len = ctx + gap_len
    search_end = s - req_len + 1
    if search_end <= 0:
        return False
    windows_valid = sliding_window_view(valid[: search_end + req_len - 1], req_len).all(axis=1)
    candidates = np.flatnonzero(windows_valid)
    if candidates.size == 0:
        return False
    cand_contexts = sliding_window_view(out[: search_end + ctx - 1], ctx)[candidates]
    distances = np.sum((cand_contexts - context) ** 2, axis=1)
    best = int(candidates[np.argmin(distances)])  # first minimum wins ties
    pattern = out[best + ctx : best + ctx + gap_len]
    shift = context[-1] - out[best + ctx - 1]
    out[s:e] = pattern + shift
    valid[s:e] = True
    return True


def impute_channel(values, times, cfg: ImputerConfig = ImputerConfig()) -> np.ndarray:
    """Fill every NaN of a 1-d series.

    Gaps of at least ``cfg.large_gap_threshold`` points preceded by a fully
    observed window of ``cfg.context_size`` points are filled by copying the
    continuation of the earlier window whose context is closest in squared
    error, shifted to meet the last observed value. Everything still missing
    is linearly interpolated in time, holding the nearest observed value
    beyond the observed range. An all-missing series becomes zeros.
    """
    out = np.array(values, dtype=np.float64).reshape(-1)
    times = np.asarray(times, dtype=np.float64).reshape(-1)
    if times.size != out.size:
        raise ValueError("need one timestamp per value")
    valid = np.isfinite(out)
    if not valid.any():
        out[:] = 0.0
        return out
    if valid.all():
        return out

    ctx = cfg.context_size
    for block in detect_missing_blocks(~valid):
        if len(block) >= cfg.large_gap_threshold and block.start >= ctx:
            _motif_fill(out, valid, block, ctx)

    valid = np.isfinite(out)
    if not valid.all():
        out[:] = np.interp(times, times[valid], out[valid])
    return out


def impute_panel(panel: TimeSeriesPanel | np.ndarray, cfg: ImputerConfig = ImputerConfig(), times=None) -> np.ndarray:
    """Impute each channel of a ``(T, D)`` panel independently.

    Cells flagged in ``prediction_mask`` are hidden before imputation.
    """
    if isinstance(panel, TimeSeriesPanel):
        values = np.where(panel.prediction_mask, np.nan, panel.values)
        times = panel.times
    else:
        values = np.array(panel, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if times is None:
            times = np.arange(values.shape[0], dtype=np.float64)
    out = np.empty_like(values, dtype=np.float64)
    for d in range(values.shape[1]):
        out[:, d] = impute_channel(values[:, d], times, cfg)
    return out


class MotifImputer(TransformerMixin, BaseEstimator):
    """Stateless transformer wrapping :func:`impute_panel`.

    ``transform`` takes a ``(T, D)`` array with NaN at missing cells; pass
    ``times`` to interpolate against real timestamps (defaults to row index).
    """

    def __init__(self, large_gap_threshold: int = 4, context_size: int = 8):
        self.large_gap_threshold = large_gap_threshold
        self.context_size = context_size

    def fit(self, X, y=None):
        self.config_ = ImputerConfig(self.large_gap_threshold, self.context_size)
        X = np.asarray(X, dtype=np.float64)
        self.n_features_in_ = 1 if X.ndim == 1 else X.shape[1]
        return self

    def transform(self, X, times=None):
        cfg = getattr(self, "config_", None) or ImputerConfig(self.large_gap_threshold, self.context_size)
        if isinstance(X, TimeSeriesPanel):
            return impute_panel(X, cfg)
        X = np.asarray(X, dtype=np.float64)
        if X.ndim > 2:
            raise ValueError("expected a (T, D) array")
        if times is not None and np.any(np.diff(np.asarray(times, dtype=np.float64)) < 0):
            raise ValueError("times must be nondecreasing")
        out = impute_panel(X, cfg, times=times)
        return out[:, 0] if X.ndim == 1 else out


def make_pointwise_mask(n_rows: int, n_cols: int, fraction: float, rng, keep_edges: bool = False) -> np.ndarray:
    """Boolean ``(n_rows, n_cols)`` mask with exactly ``round(fraction * cells)`` cells set.

    ``cells`` is ``n_rows * n_cols``; with ``keep_edges`` the first and last
    rows are never selected, so ``cells`` counts only the interior rows and
    every masked cell lies between observed values.
    """
    if not 0 <= fraction < 1:
        raise ValueError("fraction must lie in [0, 1)")
    gen = as_generator(rng)
    rows = np.arange(1, n_rows - 1) if keep_edges else np.arange(n_rows)
    total = rows.size * n_cols
    pick = gen.choice(total, size=int(round(fraction * total)), replace=False)
    mask = np.zeros((n_rows, n_cols), dtype=bool)
    mask[rows[pick // n_cols], pick % n_cols] = True
    return mask


def make_window_mask(n_rows: int, fraction: float) -> np.ndarray:
    """Centred contiguous block of ``max(1, round(fraction * n_rows))`` indices."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    length = max(1, int(round(fraction * n_rows)))
    start = (n_rows - length) // 2
    mask = np.zeros(n_rows, dtype=bool)
    mask[start : start + length] = True
    return mask


def mae_on_mask(pred, truth, mask) -> float:
    """Mean absolute error over the masked cells only."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("nothing to score: mask is empty")
    err = np.abs(pred[mask] - truth[mask])
    return math.fsum(err.tolist()) / err.size
