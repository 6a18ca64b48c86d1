import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_force_otd
from zeroshot_dynamics.core import EventSequence
from zeroshot_dynamics.tpp import accuracy, evaluate_forecasts, otd, rmse_counts, rmse_dt, smape_dt


def test_accuracy_examples():
    assert accuracy([[0, 1]], [[0, 1]]) == 1.0
    assert accuracy([[0, 1, 1]], [[0, 1, 0]]) == pytest.approx(2 / 3)
    assert accuracy([[1, 1]], [[0, 0]]) == 0.0


def test_accuracy_length_mismatch():
    with pytest.raises(ValueError):
        accuracy([[0, 1]], [[0]])


def test_rmse_counts_examples():
    assert rmse_counts([[0, 1]], [[1, 0]], 2) == 0.0
    # true counts (2, 1), predicted counts (1, 1)
    assert rmse_counts([[0, 1]], [[0, 0, 1]], 2) == pytest.approx(1.0)
    # per-sequence summed squared differences 1 and 3
    pred = [[0], [0, 0, 1]]
    truth = [[0, 0], [0, 1, 1, 2]]
    assert rmse_counts(pred, truth, 3) == pytest.approx(math.sqrt(2))


def test_rmse_dt_examples():
    assert rmse_dt([[1, 2]], [[1, 2]], [0]) == 0.0
    assert rmse_dt([[2, 2]], [[1, 2]], [0]) == pytest.approx(1.0)
    assert rmse_dt([[1.5]], [[1.0]], [0.0]) == pytest.approx(0.5)


def test_smape_examples():
    assert smape_dt([[1, 2]], [[1, 2]], [0]) == 0.0
    assert smape_dt([[3.0]], [[1.0]], [0.0]) == pytest.approx(100.0)
    assert smape_dt([[0.0]], [[1.0]], [0.0]) == pytest.approx(200.0)
    assert smape_dt([[0.0]], [[0.0]], [0.0]) == 0.0


def test_otd_examples():
    a = EventSequence([1.0, 2.0], [0, 1], 2)
    assert otd(a, a) == 0.0
    assert otd(EventSequence([], [], 2), a, 1.0) == 2.0
    assert otd(EventSequence([1.0], [0], 1), EventSequence([1.3], [0], 1), 1.0) == pytest.approx(0.3)


def test_otd_prefers_deletion_when_far():
    a = EventSequence([0.0], [0], 1)
    b = EventSequence([5.0], [0], 1)
    assert otd(a, b, 1.0) == 2.0


@st.composite
def small_pair(draw):
    k = draw(st.integers(1, 3))

    def one():
        times, marks = [], []
        for mark in range(k):
            n = draw(st.integers(0, 4))
            times += draw(st.lists(st.integers(0, 64), min_size=n, max_size=n))
            marks += [mark] * n
        # dyadic times keep all sums exact in binary floating point
        ts = np.array(times, dtype=float) / 8.0
        order = np.argsort(ts, kind="stable")
        return EventSequence(ts[order], np.array(marks, dtype=int)[order], k)

    return one(), one(), draw(st.sampled_from([0.25, 1.0, 3.0]))


@given(small_pair())
def test_otd_matches_brute_force(pair):
    a, b, c = pair
    assert otd(a, b, c) == brute_force_otd(a, b, c)


@given(small_pair(), small_pair())
def test_otd_metric_properties(p1, p2):
    a, b, c = p1
    d = p2[0]
    if d.num_marks != a.num_marks:
        d = EventSequence(d.times, np.minimum(d.marks, a.num_marks - 1), a.num_marks)
    assert otd(a, b, c) == otd(b, a, c)
    assert otd(a, b, c) >= 0
    assert (otd(a, b, c) == 0) == (sorted(zip(a.times, a.marks)) == sorted(zip(b.times, b.marks)))
    assert otd(a, b, c) <= c * (len(a) + len(b))
    assert otd(a, b, c) <= otd(a, d, c) + otd(d, b, c) + 1e-12


@given(st.lists(st.tuples(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0, 5)), min_size=1, max_size=10))
def test_smape_range_and_permutation(rows):
    pred = [[a + c] for a, _, c in rows]
    truth = [[b + c] for _, b, c in rows]
    anchors = [c for _, _, c in rows]
    v = smape_dt(pred, truth, anchors)
    assert 0 <= v <= 200
    rev = smape_dt(pred[::-1], truth[::-1], anchors[::-1])
    assert rev == pytest.approx(v, rel=1e-12)


def test_report_self_consistency():
    truth = [EventSequence([1.0, 2.5], [0, 1], 2), EventSequence([3.0, 3.5], [1, 1], 2)]
    rep = evaluate_forecasts(truth, truth, [0.5, 2.0], 2)
    assert rep.acc == 1.0
    assert rep.rmse_e == rep.rmse_dt == rep.smape_dt == rep.otd == 0.0
    assert rep.m == 2 and rep.N == 2
