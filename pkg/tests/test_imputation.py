import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from oracles import linear_fill, sawtooth_case
from zeroshot_dynamics.core import SeededRng, TimeSeriesPanel
from zeroshot_dynamics.imputation import (
    ImputerConfig,
    MissingBlock,
    MotifImputer,
    detect_missing_blocks,
    impute_channel,
    impute_panel,
    mae_on_mask,
    make_pointwise_mask,
    make_window_mask,
)


def test_detect_blocks():
    assert detect_missing_blocks([False, True, True, False, True]) == [MissingBlock(1, 3), MissingBlock(4, 5)]
    assert detect_missing_blocks([False] * 4) == []
    assert detect_missing_blocks([True] * 6) == [MissingBlock(0, 6)]


def test_all_missing_gives_zeros():
    assert impute_channel([np.nan] * 4, np.arange(4)).tolist() == [0.0] * 4


def test_all_present_unchanged():
    v = np.array([3.0, 1.0, 2.0])
    assert np.array_equal(impute_channel(v, np.arange(3)), v)


def test_ramp_small_gap_exact():
    t = np.linspace(0, 5, 11)
    v = t.copy()
    v[4:6] = np.nan
    assert np.max(np.abs(impute_channel(v, t) - t)) == 0.0


def test_sawtooth_motif_exact():
    vals, truth = sawtooth_case()
    assert np.array_equal(impute_channel(vals, np.arange(48.0)), truth)


def test_motif_level_shift_on_trend_plus_season():
    # one period adds 3.0, so the phase-matched candidate needs a level shift of exactly 3.0
    i = np.arange(60.0)
    season = np.array([0, 3, 7, 2, 9, 4, 1, 8, 5, 6, 11, 10], dtype=float)
    truth = season[np.arange(60) % 12] + 0.25 * i
    vals = truth.copy()
    vals[33:38] = np.nan
    assert np.array_equal(impute_channel(vals, i), truth)
    interp = impute_channel(vals, i, ImputerConfig(large_gap_threshold=61))
    assert np.max(np.abs(interp - truth)) > 1.0


def test_gap_without_context_falls_back_to_interpolation():
    v = np.arange(20.0)
    v[3:10] = np.nan  # qualifies by length, but starts before a full context
    assert np.array_equal(impute_channel(v, np.arange(20.0)), np.arange(20.0))


def test_panel_channels_independent():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(30, 2))
    x[rng.random((30, 2)) < 0.3] = np.nan
    a = impute_panel(x)
    y = x.copy()
    y[:, 0] = rng.normal(size=30)
    b = impute_panel(y)
    assert np.array_equal(a[:, 1], b[:, 1])
    assert np.array_equal(impute_panel(x[:, :1])[:, 0], impute_channel(x[:, 0], np.arange(30)))
    assert np.isfinite(a).all()


def test_panel_prediction_mask_hidden():
    vals = np.arange(10.0).reshape(-1, 1) ** 2
    mask = np.zeros((10, 1), bool)
    mask[5] = True
    out = impute_panel(TimeSeriesPanel(vals, np.arange(10.0), mask))
    assert out[5, 0] == (16 + 36) / 2


def test_masks():
    assert not make_pointwise_mask(10, 10, 0.0, SeededRng(0)).any()
    m = make_pointwise_mask(10, 10, 0.5, SeededRng(0))
    assert m.sum() == 50
    assert np.array_equal(m, make_pointwise_mask(10, 10, 0.5, SeededRng(0)))
    assert np.flatnonzero(make_window_mask(100, 0.2)).tolist() == list(range(40, 60))
    assert make_window_mask(100, 1e-6).sum() == 1
    inner = make_pointwise_mask(12, 3, 0.5, SeededRng(1), keep_edges=True)
    assert inner.sum() == 15 and not inner[0].any() and not inner[-1].any()


@given(st.integers(2, 500), st.floats(0.001, 0.8999))
def test_window_never_touches_edges(t, f):
    w = make_window_mask(t, f)
    length = max(1, round(f * t))
    assert w.sum() == length
    if t >= 3 and length <= t - 2:
        assert not w[0] and not w[-1]


def test_mae_on_mask():
    p = np.array([1.0, 2.0, 5.0])
    t = np.array([1.0, 3.0, 2.0])
    assert mae_on_mask(p, p, [True, True, True]) == 0.0
    assert mae_on_mask(p, t, [False, True, True]) == 2.0
    assert mae_on_mask(p + [100, 0, 0], t, [False, True, True]) == 2.0
    with pytest.raises(ValueError, match="nothing to score"):
        mae_on_mask(p, t, [False] * 3)


def test_estimator_api():
    imp = MotifImputer(context_size=4)
    assert imp.get_params() == {"context_size": 4, "large_gap_threshold": 4}
    vals, truth = sawtooth_case()
    out = MotifImputer().fit(vals[:, None]).transform(vals[:, None])
    assert np.array_equal(out[:, 0], truth)


channel = hnp.arrays(
    np.float64,
    st.integers(1, 60),
    elements=st.one_of(st.floats(-1e3, 1e3), st.just(np.nan)),
)


@given(channel, st.integers(1, 6), st.integers(1, 10))
def test_idempotent_and_preserves_observed(v, thr, ctx):
    cfg = ImputerConfig(thr, ctx)
    t = np.arange(v.size, dtype=float)
    out = impute_channel(v, t, cfg)
    assert np.isfinite(out).all()
    obs = np.isfinite(v)
    assert np.array_equal(out[obs], v[obs])
    assert np.array_equal(impute_channel(out, t, cfg), out)


@given(channel, st.lists(st.floats(0.01, 3), min_size=60, max_size=60))
def test_matches_interpolation_oracle_without_large_gaps(v, gaps):
    t = np.cumsum(gaps)[: v.size]
    cfg = ImputerConfig(large_gap_threshold=v.size + 1)
    assert np.allclose(impute_channel(v, t, cfg), linear_fill(v, t), rtol=1e-12, atol=1e-9)
