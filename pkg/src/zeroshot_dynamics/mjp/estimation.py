"""Single-pass generator estimation from discretely observed jump-process paths."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..core import MjpObservationSet, check_generator, check_prob_vector

__all__ = [
    "MjpEstimate",
    "MjpRateEstimator",
    "estimate_mjp_parameters",
    "extract_dfr_parameters",
    "cross_entropy",
    "offdiag_rmse",
    "mjp_fitness",
    "DegenerateGeneratorError",
]


class DegenerateGeneratorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MjpEstimate:
    q: np.ndarray
    init: np.ndarray
    typical_dt: float = float("nan")

    @property
    def n_states(self) -> int:
        return int(self.init.size)


def estimate_mjp_parameters(obs: MjpObservationSet) -> MjpEstimate:
    """Estimate a rate matrix and initial distribution with exit/exposure counting.

    Exit hazards are smoothed exit counts over capped exposure time; each
    hazard is spread over destinations by transition counts weighted towards
    short observation intervals. All time constants are multiples of the
    median positive observation interval, so rescaling time rescales the
    rates exactly.
    """
    n_states = obs.n_states
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    grid = obs.grid
    values = obs.values
    seq_lengths = obs.seq_lengths
    batch_size, max_len = grid.shape

    valid_paths = seq_lengths > 0
    if not np.any(valid_paths):
        return MjpEstimate(np.zeros((n_states, n_states)), np.ones(n_states) / n_states, 1.0)

    first_obs = values[valid_paths, 0]
    counts = np.bincount(first_obs, minlength=n_states).astype(np.float64) + 1.0
    has_second = seq_lengths > 1
    if np.any(has_second):
        counts += np.bincount(values[has_second, 1], minlength=n_states) * 0.5
    init = counts / np.sum(counts)

    mask = np.arange(max_len - 1)[None, :] < (seq_lengths[:, None] - 1)
    dts = np.diff(grid, axis=1)[mask]
    pos = dts[dts > 0]
    typical_dt = float(np.median(pos)) if pos.size else 1.0
    typical_dt = max(1e-8, typical_dt)

    curr = values[:, :-1][mask]
    nxt = values[:, 1:][mask]
    last_idx = np.maximum(0, seq_lengths - 1)
    last_states = values[np.arange(batch_size), last_idx][valid_paths]

    # float cast: bincount of an empty weighted input comes back as int
    exposure = np.bincount(curr, weights=np.minimum(dts, 2.0 * typical_dt), minlength=n_states).astype(np.float64)
    exposure += np.bincount(last_states, minlength=n_states) * (0.5 * typical_dt)

    # changes over implausibly short intervals are treated as observation noise
    change = (curr != nxt) & (dts > 0.02 * typical_dt)
    exits = np.bincount(curr[change], minlength=n_states)

    dest = np.zeros((n_states, n_states), dtype=np.float64)
    np.add.at(dest, (curr[change], nxt[change]), np.exp(-dts[change] / typical_dt))

    hazard = (exits + 0.1) / (exposure + 0.25 * typical_dt)
    hazard = np.clip(hazard, 1e-8 / typical_dt, 10.0 / typical_dt)

    p_off = dest + 0.05 / max(1, n_states - 1)
    np.fill_diagonal(p_off, 0.0)
    row_sums = p_off.sum(axis=1, keepdims=True)
    row_sums[row_sums == 0] = 1.0
    p_off /= row_sums

    q = hazard[:, None] * p_off
    np.fill_diagonal(q, 0.0)
    q[np.diag_indices(n_states)] = -q.sum(axis=1)
    return MjpEstimate(q, init, typical_dt)


class MjpRateEstimator(BaseEstimator):
    """Estimator wrapper around :func:`estimate_mjp_parameters`.

    After ``fit`` the attributes ``rate_matrix_``, ``initial_distribution_``
    and ``typical_dt_`` hold the estimate. The heuristic has no hyperparameters.
    """

    def fit(self, X: MjpObservationSet, y=None):
        if not isinstance(X, MjpObservationSet):
            raise TypeError("X must be an MjpObservationSet")
        res = X.validate()
        if not res.ok:
            raise ValueError("invalid observations: " + "; ".join(res.violations[:3]))
        est = estimate_mjp_parameters(X)
        self.estimate_ = est
        self.rate_matrix_ = est.q
        self.initial_distribution_ = est.init
        self.typical_dt_ = est.typical_dt
        self.n_states_ = X.n_states
        return self

    def score(self, X=None, y=None, *, true_q, true_init) -> float:
        """Fitness against known ground truth (higher is better)."""
        check_is_fitted(self, "estimate_")
        return mjp_fitness(self.estimate_, true_q, true_init)


_ON = (0, 1, 2)
_OFF = (3, 4, 5)


def extract_dfr_parameters(q) -> tuple[float, float, float]:
    """Recover ``(V, r, b)`` from a 6-state ratchet generator.

    State order is ``1on, 2on, 3on, 1off, 2off, 3off``. ``V`` is the
    through-origin least-squares slope of ``-2 log Q[i_on, j_on]`` against
    ``j - i``; ``r`` and ``b`` are the means of the switching and off-sector
    entries. Nonpositive on-sector entries are dropped from the fit.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (6, 6):
        raise ValueError(f"ratchet generator must be 6x6, got {q.shape}")
    xs, ys = [], []
    for i in range(3):
        for j in range(3):
            if i != j and q[_ON[i], _ON[j]] > 0:
                xs.append(j - i)
                ys.append(-2.0 * math.log(q[_ON[i], _ON[j]]))
    if not xs:
        raise DegenerateGeneratorError("degenerate on-sector: no positive on-sector rates")
    x = np.array(xs, dtype=np.float64)
    v = float(np.dot(x, ys) / np.dot(x, x))
    r = float(np.mean([q[_ON[i], _OFF[i]] for i in range(3)] + [q[_OFF[i], _ON[i]] for i in range(3)]))
    b = float(np.mean([q[_OFF[i], _OFF[j]] for i in range(3) for j in range(3) if i != j]))
    return v, r, b


def cross_entropy(p_true, p_pred, floor: float = 1e-12) -> float:
    p_true = np.asarray(p_true, dtype=np.float64)
    p_pred = np.maximum(np.asarray(p_pred, dtype=np.float64), floor)
    return float(-np.sum(p_true * np.log(p_pred)))


def offdiag_rmse(q_pred, q_true) -> float:
    q_pred = np.asarray(q_pred, dtype=np.float64)
    q_true = np.asarray(q_true, dtype=np.float64)
    off = ~np.eye(q_true.shape[0], dtype=bool)
    if not off.any():
        return 0.0
    return float(np.sqrt(np.mean((q_pred[off] - q_true[off]) ** 2)))


def mjp_fitness(pred: MjpEstimate, truth_q, truth_init) -> float:
    """Negative of (initial-distribution cross-entropy + off-diagonal rate RMSE)."""
    truth_q = check_generator(truth_q)
    truth_init = check_prob_vector(truth_init, truth_q.shape[0])
    if pred.q.shape != truth_q.shape:
        raise ValueError(f"state count mismatch: {pred.q.shape} vs {truth_q.shape}")
    return -(cross_entropy(truth_init, pred.init) + offdiag_rmse(pred.q, truth_q))
