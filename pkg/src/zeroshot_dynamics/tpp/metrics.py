"""Forecast metrics for marked event sequences.

All metrics average per test sequence first and then over sequences. Gaps are
anchored at the last observed history time, so the first forecast gap is
``t_1 - t_last``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ..core import EventSequence

__all__ = [
    "TppMetricReport",
    "accuracy",
    "rmse_counts",
    "rmse_dt",
    "smape_dt",
    "otd",
    "mean_otd",
    "evaluate_forecasts",
]


@dataclass(frozen=True)
class TppMetricReport:
    acc: float
    rmse_e: float
    rmse_dt: float
    smape_dt: float
    otd: float
    m: int
    N: int

    def to_dict(self) -> dict:
        return asdict(self)


def _paired(pred, truth, same_length: bool = True) -> list[tuple[np.ndarray, np.ndarray]]:
    if len(pred) != len(truth):
        raise ValueError(f"{len(pred)} predicted sequences vs {len(truth)} true sequences")
    out = []
    for j, (p, t) in enumerate(zip(pred, truth)):
        p = np.asarray(p)
        t = np.asarray(t)
        if same_length and p.shape != t.shape:
            raise ValueError(f"sequence {j}: predicted length {p.shape} differs from true length {t.shape}")
        out.append((p, t))
    return out


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values) if values else float("nan")


def accuracy(pred: Sequence[Sequence[int]], truth: Sequence[Sequence[int]]) -> float:
    """Mean over sequences of the fraction of positions with the correct mark."""
    return _mean([float(np.mean(p == t)) if t.size else 0.0 for p, t in _paired(pred, truth)])


def rmse_counts(pred, truth, num_marks: int) -> float:
    """Root of the mean (over sequences) summed squared per-mark count error.

    Counts are defined for any lengths, so unequal-length pairs are allowed.
    """
    terms = []
    for p, t in _paired(pred, truth, same_length=False):
        diff = np.bincount(p, minlength=num_marks) - np.bincount(t, minlength=num_marks)
        terms.append(float(np.sum(diff.astype(np.float64) ** 2)))
    return math.sqrt(_mean(terms))


def _gaps(times, anchor: float) -> np.ndarray:
    times = np.asarray(times, dtype=np.float64)
    return np.diff(np.concatenate(([anchor], times)))


def _gap_pairs(pred_times, truth_times, history_last_times):
    pairs = _paired(pred_times, truth_times)
    if len(history_last_times) != len(pairs):
        raise ValueError("need one history anchor time per sequence")
    return [(_gaps(p, a), _gaps(t, a)) for (p, t), a in zip(pairs, history_last_times)]


def rmse_dt(pred_times, truth_times, history_last_times) -> float:
    terms = [float(np.mean((t - p) ** 2)) for p, t in _gap_pairs(pred_times, truth_times, history_last_times)]
    return math.sqrt(_mean(terms))


def smape_dt(pred_times, truth_times, history_last_times) -> float:
    """Symmetric MAPE of the gaps, in percent; zero-denominator terms count as 0."""
    terms = []
    for p, t in _gap_pairs(pred_times, truth_times, history_last_times):
        den = np.abs(t) + np.abs(p)
        ratio = np.divide(2.0 * np.abs(t - p), den, out=np.zeros_like(den), where=den > 0)
        terms.append(float(np.mean(ratio)))
    return 100.0 * _mean(terms)


def _align_cost(a: np.ndarray, b: np.ndarray, del_cost: float) -> float:
    # edit distance on time-sorted events: match |a_i - b_j|, insert/delete del_cost
    n, m = a.size, b.size
    prev = np.arange(m + 1, dtype=np.float64) * del_cost
    for i in range(1, n + 1):
        cur = np.empty(m + 1)
        cur[0] = i * del_cost
        ai = a[i - 1]
        for j in range(1, m + 1):
            cur[j] = min(prev[j - 1] + abs(ai - b[j - 1]), prev[j] + del_cost, cur[j - 1] + del_cost)
        prev = cur
    return float(prev[m])


def otd(pred: EventSequence, truth: EventSequence, del_cost: float = 1.0) -> float:
    """Optimal-transport style distance between two event sequences.

    Events can only be matched to events of the same mark, at cost equal to
    their absolute time difference; each unmatched event costs ``del_cost``.
    Per mark the optimal matching is non-crossing, so it is found by an
    edit-distance recursion over the time-sorted events.
    """
    if del_cost <= 0:
        raise ValueError("del_cost must be positive")
    marks = np.union1d(pred.marks, truth.marks)
    total = 0.0
    for k in marks:
        a = np.sort(pred.times[pred.marks == k])
        b = np.sort(truth.times[truth.marks == k])
        total += _align_cost(a, b, del_cost)
    return total


def mean_otd(pred: Sequence[EventSequence], truth: Sequence[EventSequence], del_cost: float = 1.0) -> float:
    if len(pred) != len(truth):
        raise ValueError("need one prediction per true sequence")
    return _mean([otd(p, t, del_cost) for p, t in zip(pred, truth)])


def evaluate_forecasts(
    pred: Sequence[EventSequence],
    truth: Sequence[EventSequence],
    history_last_times: Sequence[float],
    num_marks: int,
    del_cost: float = 1.0,
) -> TppMetricReport:
    """All five forecast metrics for paired predicted/true future sequences."""
    pm = [p.marks for p in pred]
    tm = [t.marks for t in truth]
    pt = [p.times for p in pred]
    tt = [t.times for t in truth]
    horizon = len(truth[0]) if truth else 0
    return TppMetricReport(
        acc=accuracy(pm, tm),
        rmse_e=rmse_counts(pm, tm, num_marks),
        rmse_dt=rmse_dt(pt, tt, history_last_times),
        smape_dt=smape_dt(pt, tt, history_last_times),
        otd=mean_otd(pred, truth, del_cost),
        m=len(truth),
        N=horizon,
    )
