from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..core import EventSequence, validate_event_sequence
from .heuristics import (
    build_context_stats_evil,
    build_context_stats_sp,
    predict_next_evil,
    predict_next_sp,
    rollout_horizon,
)

VARIANTS = ("evil", "synthetic-prior")


def _check_sequences(sequences, num_marks: int, what: str) -> list[EventSequence]:
    out = []
    for i, seq in enumerate(sequences):
        if not isinstance(seq, EventSequence):
            times, marks = seq
            seq = EventSequence(times, marks, num_marks)
        elif seq.num_marks != num_marks:
            seq = EventSequence(seq.times, seq.marks, num_marks)
        res = validate_event_sequence(seq)
        if not res.ok:
            raise ValueError(f"{what} {i}: " + "; ".join(res.violations[:3]))
        out.append(seq)
    return out


class NextEventPredictor(BaseEstimator):
    """Zero-shot next-event predictor for marked point processes.

    ``fit`` only summarises the context sequences (no parameters are learned
    by optimisation); ``predict`` maps target histories to their next event and
    ``rollout`` forecasts several events autoregressively.

    Parameters
    ----------
    variant : {"evil", "synthetic-prior"}
        ``"evil"`` mixes recency-weighted gaps with mark-conditioned means and
        scores marks with local and smoothed global transitions.
        ``"synthetic-prior"`` picks marks through a second-order/first-order/
        majority hierarchy and times through edge-specific median gaps.
    num_marks : int, optional
        Number of marks. Inferred from the data if omitted.
    """

    def __init__(self, variant: str = "evil", num_marks: int | None = None):
        self.variant = variant
        self.num_marks = num_marks

    def fit(self, X: Sequence[EventSequence], y=None):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        k = self.num_marks
        if k is None:
            ks = [s.num_marks for s in X if isinstance(s, EventSequence)]
            marks = [int(np.max(s[1])) + 1 for s in X if not isinstance(s, EventSequence) and len(s[1])]
            k = max(ks + marks + [1])
        context = _check_sequences(X, int(k), "context sequence")
        build = build_context_stats_evil if self.variant == "evil" else build_context_stats_sp
        self.stats_ = build(context, int(k))
        self.num_marks_ = int(k)
        return self

    def predict(self, histories: Sequence[EventSequence]):
        """Return ``(next_times, next_marks)`` arrays, one entry per history."""
        check_is_fitted(self, "stats_")
        histories = _check_sequences(histories, self.num_marks_, "history")
        rule = predict_next_evil if self.variant == "evil" else predict_next_sp
        return rule(histories, self.stats_, self.num_marks_)

    def rollout(self, prefix: EventSequence, n_events: int) -> EventSequence:
        check_is_fitted(self, "stats_")
        (prefix,) = _check_sequences([prefix], self.num_marks_, "prefix")
        return rollout_horizon(prefix, self.stats_, n_events)
