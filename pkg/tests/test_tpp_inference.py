import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zeroshot_dynamics.core import EventSequence
from zeroshot_dynamics.tpp import (
    NextEventPredictor,
    build_context_stats_evil,
    build_context_stats_sp,
    predict_next_evil,
    predict_next_sp,
    rollout_horizon,
)


def seq(times, marks, k=2):
    return EventSequence(times, marks, k)


def alternating(n=20, k=2):
    return seq(np.arange(n, dtype=float), [i % 2 for i in range(n)], k)


@st.composite
def sequences(draw, k=3, max_len=12):
    n = draw(st.integers(0, max_len))
    gaps = draw(st.lists(st.floats(0.01, 10.0), min_size=n, max_size=n))
    marks = draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    start = draw(st.floats(0, 100))
    return EventSequence(start + np.cumsum(gaps), marks, k)


# -- evil variant


def test_evil_stats_hand_trace():
    s = build_context_stats_evil([seq([0, 1, 2], [0, 1, 0])], 2)
    assert s.global_gap == 1.0
    assert s.majority_mark == 0
    assert s.mean_gap.tolist() == [1.0, 1.0]
    assert s.transition[0] == pytest.approx([1 / 3, 2 / 3], abs=1e-12)


def test_evil_empty_context():
    s = build_context_stats_evil([], 3)
    assert s.global_gap == 1.0 and s.majority_mark == 0
    assert np.allclose(s.transition, 1 / 3)


def test_evil_global_gap_is_median():
    s = build_context_stats_evil([seq([0, 1, 2], [0, 0, 0], 1), seq([0, 5], [0, 0], 1)], 1)
    assert s.global_gap == 1.0


def test_evil_empty_prefix_predicts_global_gap_and_majority():
    s = build_context_stats_evil([seq([0, 1, 2], [0, 1, 0])], 2)
    t, m = predict_next_evil([seq([], [])], s)
    assert abs(t[0] - 1.0) < 1e-9 and m[0] == 0


def test_evil_single_event_uses_mark_mean_gap():
    s = build_context_stats_evil([seq([0, 1, 2], [0, 1, 0])], 2)
    t, _ = predict_next_evil([seq([10.0], [1])], s)
    assert t[0] == pytest.approx(11.0, abs=1e-12)


def test_evil_alternating_context_predicts_other_mark():
    s = build_context_stats_evil([alternating()], 2)
    _, m = predict_next_evil([seq([0, 1, 2], [1, 1, 0])], s)
    assert m[0] == 1


def test_evil_two_event_oracle():
    # independent transcription: prefix gaps [2]; last mark 0 seen with mean gap 1
    s = build_context_stats_evil([seq([0, 1, 2], [0, 1, 0])], 2)
    t, _ = predict_next_evil([seq([0.0, 2.0], [1, 0])], s)
    w = math.exp(-1.0)  # single recent gap; weights normalised with a 1e-12 guard
    rec = 2.0 * w / (w + 1e-12)
    est = 0.6 * rec + 0.4 * 1.0
    assert t[0] == pytest.approx(2.0 + est, abs=1e-12)


# -- synthetic-prior variant


def test_sp_stats_hand_trace():
    s = build_context_stats_sp([seq([0, 1, 3], [0, 1, 0])], 2)
    assert s.edge_median_gap[(0, 1)] == 1.0
    assert s.edge_median_gap[(1, 0)] == 2.0
    assert s.prev_median_gap.tolist() == [1.0, 2.0]
    assert s.next_median_gap.tolist() == [2.0, 1.0]
    assert s.global_gap == 1.5


def test_sp_pair_table():
    s = build_context_stats_sp([seq([0, 1, 2, 3], [0, 1, 0, 1])], 2)
    assert s.pair[(0, 1)][0] > 0


def test_sp_empty_context():
    s = build_context_stats_sp([], 3)
    assert s.global_gap == 1.0 and s.majority_mark == 0
    assert s.next_by_prev.tolist() == [0, 0, 0]


def test_sp_empty_history():
    s = build_context_stats_sp([seq([0, 1, 3], [0, 1, 0])], 2)
    t, m = predict_next_sp([seq([], [])], s)
    assert t[0] == 1.5 and m[0] == s.majority_mark


def test_sp_hand_trace_two_event_history():
    s = build_context_stats_sp([seq([0, 1, 3], [0, 1, 0])], 2)
    t, m = predict_next_sp([seq([0.0, 2.0], [0, 1])], s)
    # pair (0,1) unseen as a prefix pair followed by anything -> first-order argmax out of 1 -> mark 0
    assert m[0] == 0
    # edge (1,0) median is 2; local median of gaps [2] is 2; alpha 0.5 for a short history
    assert t[0] == pytest.approx(2.0 + 0.5 * 2.0 + 0.5 * 2.0)


def test_sp_single_event_history():
    s = build_context_stats_sp([seq([0, 1, 3], [0, 1, 0])], 2)
    t, m = predict_next_sp([seq([5.0], [0])], s)
    assert m[0] == 1
    assert t[0] == pytest.approx(6.0)


# -- rollout


def test_rollout_one_equals_predict():
    ctx = [seq([0, 1, 2, 4, 5], [0, 1, 0, 1, 1])]
    for variant in ("evil", "synthetic-prior"):
        est = NextEventPredictor(variant, num_marks=2).fit(ctx)
        prefix = seq([0.0, 1.5, 2.0], [1, 0, 1])
        out = est.rollout(prefix, 1)
        t, m = est.predict([prefix])
        assert out.times[0] == t[0] and out.marks[0] == m[0]


def test_rollout_alternates():
    s = build_context_stats_evil([alternating()], 2)
    out = rollout_horizon(seq([0, 1, 2], [1, 0, 0]), s, 4)
    assert out.marks.tolist() == [1, 0, 1, 0]
    assert np.all(np.diff(np.concatenate([[2.0], out.times])) > 0)


def test_estimator_params_and_validation():
    est = NextEventPredictor()
    assert est.get_params() == {"variant": "evil", "num_marks": None}
    with pytest.raises(ValueError):
        NextEventPredictor("nope").fit([alternating()])


# -- properties


@given(st.lists(sequences(), max_size=4), st.lists(sequences(), min_size=1, max_size=4))
def test_evil_invariants(context, histories):
    s = build_context_stats_evil(context, 3)
    assert np.allclose(s.transition.sum(axis=1), 1.0)
    times, marks = predict_next_evil(histories, s)
    for h, t, m in zip(histories, times, marks):
        assert 0 <= m < 3
        if len(h):
            assert t >= h.times[-1] + 1e-6 * (1 - 1e-9)
        if len(h) >= 2:
            gaps = np.diff(h.times)[-5:]
            w = np.exp(np.linspace(-1, 0, max(1, len(gaps))))[-len(gaps):]
            rec = float(np.sum(w * gaps) / np.sum(w))
            assert t - h.times[-1] <= 20 * max(rec, s.global_gap) * (1 + 1e-12)


@given(st.lists(sequences(), max_size=4), st.lists(sequences(), min_size=1, max_size=4))
def test_sp_marks_in_range(context, histories):
    s = build_context_stats_sp(context, 3)
    _, marks = predict_next_sp(histories, s)
    assert all(0 <= m < 3 for m in marks)


@given(st.lists(sequences(), min_size=1, max_size=5), st.randoms(use_true_random=False))
def test_stats_permutation_invariant(context, r):
    shuffled = list(context)
    r.shuffle(shuffled)
    a, b = build_context_stats_evil(context, 3), build_context_stats_evil(shuffled, 3)
    assert np.array_equal(a.transition, b.transition)
    assert np.array_equal(a.mean_gap, b.mean_gap)
    assert a.global_gap == b.global_gap and a.majority_mark == b.majority_mark
    c, d = build_context_stats_sp(context, 3), build_context_stats_sp(shuffled, 3)
    assert np.array_equal(c.trans, d.trans)
    assert c.edge_median_gap == d.edge_median_gap
    assert np.array_equal(c.prev_median_gap, d.prev_median_gap)
    assert {k: v.tolist() for k, v in c.pair.items()} == {k: v.tolist() for k, v in d.pair.items()}


@given(sequences(max_len=6), st.integers(1, 6))
def test_rollout_times_increase(prefix, n):
    s = build_context_stats_evil([prefix], 3)
    out = rollout_horizon(prefix, s, n)
    assert len(out) == n
    full = np.concatenate([prefix.times, out.times])
    assert np.all(np.diff(full) > 0)
    assert not math.isnan(out.times.sum())
