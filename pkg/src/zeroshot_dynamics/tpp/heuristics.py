"""Context statistics and next-event rules for the two point-process heuristics.

Both predictors work in two phases: a pure fold over the context sequences
builds summary statistics, then each target history is mapped to a predicted
``(time, mark)`` using only those statistics and the history itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..core import EventSequence

__all__ = [
    "EvilContextStats",
    "SyntheticPriorContextStats",
    "build_context_stats_evil",
    "build_context_stats_sp",
    "predict_next_evil",
    "predict_next_sp",
    "rollout_horizon",
]

TIME_FLOOR = 1e-6
RECENT_GAPS = 5


def _median(values) -> float:
    # even counts average the two central order statistics
    return float(np.median(np.asarray(values, dtype=np.float64)))


@dataclass(frozen=True, eq=False)
class EvilContextStats:
    transition: np.ndarray  # (K, K) smoothed, row-normalised P(b | a)
    mean_gap: np.ndarray  # (K,) mean gap after each previous mark; ggap where unseen
    gap_count: np.ndarray  # (K,) number of gaps observed after each mark
    global_gap: float
    mark_counts: np.ndarray  # (K,)
    majority_mark: int

    @property
    def num_marks(self) -> int:
        return int(self.mark_counts.size)


@dataclass(frozen=True, eq=False)
class SyntheticPriorContextStats:
    trans: np.ndarray  # (K, K) first-order transition counts
    pair: dict = field(repr=False)  # (a, b) -> (K,) counts of the mark following a, b
    prev_median_gap: np.ndarray  # (K,) median outgoing gap per previous mark
    next_median_gap: np.ndarray  # (K,) median incoming gap per next mark
    edge_median_gap: dict = field(repr=False)  # (a, b) -> median gap on that transition
    global_gap: float
    majority_mark: int
    row_counts: np.ndarray
    next_by_prev: np.ndarray

    @property
    def num_marks(self) -> int:
        return int(self.row_counts.size)


def _as_arrays(seq) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(seq, EventSequence):
        return seq.times, seq.marks
    times, marks = seq
    return np.asarray(times, np.float64), np.asarray(marks, np.int64)


def build_context_stats_evil(context: Sequence[EventSequence], num_marks: int) -> EvilContextStats:
    k = int(num_marks)
    if k < 1:
        raise ValueError("num_marks must be >= 1")
    deltas: list[np.ndarray] = []
    counts = np.zeros(k, np.int64)
    trans = np.zeros((k, k), np.float64)
    gaps_after: list[list[float]] = [[] for _ in range(k)]

    for seq in context:
        t, m = _as_arrays(seq)
        if t.size >= 2:
            d = np.diff(t)
            deltas.append(d)
            for prev_mark, dd in zip(m[:-1].tolist(), d.tolist()):
                if 0 <= prev_mark < k:
                    gaps_after[prev_mark].append(dd)
        if m.size:
            counts += np.bincount(m, minlength=k)[:k]
        if m.size >= 2:
            a, b = m[:-1], m[1:]
            ok = (a >= 0) & (a < k) & (b >= 0) & (b < k)
            np.add.at(trans, (a[ok], b[ok]), 1.0)

    all_gaps = np.concatenate(deltas) if deltas else np.empty(0)
    ggap = _median(all_gaps) if all_gaps.size else 1.0
    gmaj = int(np.argmax(counts)) if counts.sum() > 0 else 0

    smoothed = trans + 1.0
    smoothed /= smoothed.sum(axis=1, keepdims=True) + 1e-12

    # fsum keeps the per-mark means independent of context order
    g_cnt = np.array([len(g) for g in gaps_after], dtype=np.int64)
    mean_gap = np.array(
        [math.fsum(g) / len(g) if g else ggap for g in gaps_after], dtype=np.float64
    )
    return EvilContextStats(smoothed, mean_gap, g_cnt, ggap, counts, gmaj)


def _predict_one_evil(t: np.ndarray, m: np.ndarray, s: EvilContextStats) -> tuple[float, int]:
    k = s.num_marks
    n = t.size
    if n == 0:
        return s.global_gap, s.majority_mark

    last_t = float(t[-1])
    last_m = int(m[-1]) if m.size else -1
    mark_known = 0 <= last_m < k and s.gap_count[last_m] > 0

    if n >= 2:
        recent = np.diff(t)[-RECENT_GAPS:]
        lr = recent.size
        w = np.exp(np.linspace(-1.0, 0.0, max(1, lr)))[-lr:]
        w = w / (w.sum() + 1e-12)
        rec_est = float(np.dot(recent, w))
        if mark_known:
            base = 0.6 * rec_est + 0.4 * s.mean_gap[last_m]
        else:
            base = 0.75 * rec_est + 0.25 * s.global_gap
        base = max(float(base), TIME_FLOOR)
        cap = 20.0 * max(rec_est if rec_est > 0 else s.global_gap, s.global_gap)
        next_t = last_t + min(base, cap)
    else:
        delta = float(s.mean_gap[last_m]) if mark_known else s.global_gap
        next_t = last_t + max(delta, TIME_FLOOR)

    scores = np.zeros(k, dtype=np.float64)
    if m.size >= 2:
        after_last = m[1:][m[:-1] == last_m]
        if after_last.size:
            scores += np.bincount(after_last, minlength=k)[:k]
    scores += 0.25 * np.bincount(m, minlength=k)[:k]
    if 0 <= last_m < k:
        scores += 2.0 * s.transition[last_m]
    else:
        scores += 0.5 * (s.mark_counts + 1.0)

    mark = s.majority_mark if scores.sum() <= 0 else int(np.argmax(scores))
    return next_t, mark


def predict_next_evil(histories: Sequence[EventSequence], stats: EvilContextStats, num_marks: int | None = None):
    """Predict the next event of every history with the recency/transition mixture rule.

    Returns
    -------
    times : ndarray of float, shape (n,)
    marks : ndarray of int, shape (n,)
    """
    _check_k(stats, num_marks)
    out_t = np.zeros(len(histories), np.float64)
    out_m = np.zeros(len(histories), np.int64)
    for i, h in enumerate(histories):
        out_t[i], out_m[i] = _predict_one_evil(*_as_arrays(h), stats)
    return out_t, out_m


def build_context_stats_sp(context: Sequence[EventSequence], num_marks: int) -> SyntheticPriorContextStats:
    k = int(num_marks)
    if k < 1:
        raise ValueError("num_marks must be >= 1")
    trans = np.zeros((k, k), dtype=np.int64)
    per_prev: list[list[float]] = [[] for _ in range(k)]
    per_next: list[list[float]] = [[] for _ in range(k)]
    pair: dict[tuple[int, int], np.ndarray] = {}
    edge_dt: dict[tuple[int, int], list[float]] = {}
    all_dt: list[float] = []
    all_m: list[int] = []

    for seq in context:
        t, m = _as_arrays(seq)
        lm = m.size
        if t.size > 1:
            dt = np.diff(t)
            all_dt.extend(dt.tolist())
            span = min(dt.size, lm - 1) if lm > 0 else 0
            for j in range(span):
                d, a, b = float(dt[j]), int(m[j]), int(m[j + 1])
                per_prev[a].append(d)
                per_next[b].append(d)
                trans[a, b] += 1
                edge_dt.setdefault((a, b), []).append(d)
            if lm > 2:
                for j in range(lm - 2):
                    key = (int(m[j]), int(m[j + 1]))
                    if key not in pair:
                        pair[key] = np.zeros(k, dtype=np.int64)
                    pair[key][m[j + 2]] += 1
        if lm > 0:
            all_m.extend(m.tolist())

    gmd = _median(all_dt) if all_dt else 1.0
    gmm = int(np.bincount(all_m).argmax()) if all_m else 0
    pmd = np.full(k, gmd, dtype=np.float64)
    nmd = np.full(k, gmd, dtype=np.float64)
    for c in range(k):
        if per_prev[c]:
            pmd[c] = _median(per_prev[c])
        if per_next[c]:
            nmd[c] = _median(per_next[c])
    next_by_prev = (trans + 1).argmax(axis=1)
    row_counts = trans.sum(axis=1)
    edge_md = {key: _median(v) for key, v in edge_dt.items()}
    return SyntheticPriorContextStats(trans, pair, pmd, nmd, edge_md, gmd, gmm, row_counts, next_by_prev)


def _predict_one_sp(th: np.ndarray, mh: np.ndarray, s: SyntheticPriorContextStats) -> tuple[float, int]:
    k = s.num_marks
    ln = mh.size
    lm = int(mh[-1]) if ln > 0 else -1
    has_row = 0 <= lm < k and s.row_counts[lm] > 0

    if ln >= 2 and (key := (int(mh[-2]), lm)) in s.pair and s.pair[key].sum() > 0:
        nm = int(s.pair[key].argmax())
    elif ln >= 1 and has_row:
        nm = int(s.next_by_prev[lm])
    else:
        nm = s.majority_mark

    if th.size == 0:
        return s.global_gap, nm

    if ln > 0 and 0 <= lm < k and 0 <= nm < k:
        edge = s.edge_median_gap.get((lm, nm))
        dref = 0.5 * (s.prev_median_gap[lm] + s.next_median_gap[nm]) if edge is None else edge
    else:
        dref = s.global_gap

    if th.size > 1:
        dloc = _median(np.diff(th[-min(RECENT_GAPS, th.size):]))
        alpha = 0.65 if th.size >= 3 else 0.5
        d = alpha * dloc + (1.0 - alpha) * dref
    else:
        d = dref
    return float(th[-1]) + float(d), nm


def predict_next_sp(histories: Sequence[EventSequence], stats: SyntheticPriorContextStats, num_marks: int | None = None):
    """Predict the next event of every history with the transition-hierarchy rule."""
    _check_k(stats, num_marks)
    out_t = np.zeros(len(histories), np.float64)
    out_m = np.zeros(len(histories), np.int64)
    for i, h in enumerate(histories):
        out_t[i], out_m[i] = _predict_one_sp(*_as_arrays(h), stats)
    return out_t, out_m


def _check_k(stats, num_marks):
    if num_marks is not None and int(num_marks) != stats.num_marks:
        raise ValueError(f"stats were built for {stats.num_marks} marks, got num_marks={num_marks}")


_RULES = {
    EvilContextStats: _predict_one_evil,
    SyntheticPriorContextStats: _predict_one_sp,
}


def predict_one(history: EventSequence, stats) -> tuple[float, int]:
    return _RULES[type(stats)](*_as_arrays(history), stats)


def rollout_horizon(prefix: EventSequence, stats, n: int) -> EventSequence:
    """Closed-loop forecast: append each prediction to the history and predict again.

    Returns only the ``n`` generated events.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    rule = _RULES[type(stats)]
    times = list(prefix.times.tolist())
    marks = list(prefix.marks.tolist())
    for _ in range(n):
        t, m = rule(np.asarray(times, np.float64), np.asarray(marks, np.int64), stats)
        times.append(t)
        marks.append(m)
    start = len(prefix)
    return EventSequence(times[start:], marks[start:], stats.num_marks)
