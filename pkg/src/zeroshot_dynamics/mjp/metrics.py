"""Hellinger-distance comparison of simulated and observed state occupancies."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..core import MjpObservationSet, SeededRng
from .estimation import MjpEstimate
from .simulation import sample_on_grid

__all__ = ["HellingerReport", "hellinger", "state_histograms", "time_averaged_hellinger"]


@dataclass(frozen=True)
class HellingerReport:
    mean: float
    std: float
    repetitions: int
    n_grid_times: int

    def to_dict(self) -> dict:
        return asdict(self)


def hellinger(p, q) -> float:
    """``sqrt(sum (sqrt p - sqrt q)^2 / 2)``, a metric with values in ``[0, 1]``."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"distributions differ in size: {p.shape} vs {q.shape}")
    return min(1.0, math.sqrt(0.5 * float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2))))


def _hellinger_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.minimum(1.0, np.sqrt(0.5 * np.sum((np.sqrt(p) - np.sqrt(q)) ** 2, axis=1)))


def state_histograms(obs: MjpObservationSet) -> tuple[np.ndarray, np.ndarray]:
    """Pool observations with identical times into normalised per-time state histograms.

    Returns
    -------
    times : ndarray (L,)
        Sorted distinct observation times.
    hist : ndarray (L, K)
    """
    mask = np.arange(obs.grid.shape[1])[None, :] < obs.seq_lengths[:, None]
    t = obs.grid[mask]
    s = obs.values[mask]
    times, inv = np.unique(t, return_inverse=True)
    counts = np.zeros((times.size, obs.n_states))
    np.add.at(counts, (inv, s), 1.0)
    return times, counts / counts.sum(axis=1, keepdims=True)


def _model_histograms(model: MjpEstimate, times: np.ndarray, n_paths: int, rng: SeededRng) -> np.ndarray:
    states = sample_on_grid(model.q, model.init, times, n_paths=n_paths, rng=rng)
    counts = np.zeros((times.size, model.n_states))
    for col in range(times.size):
        counts[col] = np.bincount(states[:, col], minlength=model.n_states)
    return counts / n_paths


def time_averaged_hellinger(
    target: MjpObservationSet,
    model: MjpEstimate,
    n_paths: int,
    rng: SeededRng | int,
    repetitions: int = 100,
    threads: int = 1,
) -> HellingerReport:
    """Mean and spread of the grid-averaged Hellinger distance between target and model occupancies.

    Target histograms are fixed; each repetition simulates ``n_paths`` fresh
    model paths from its own random stream, so the result does not depend
    on ``threads``.
    """
    if target.n_states != model.n_states:
        raise ValueError("target and model have different state counts")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    times, target_hist = state_histograms(target)
    if times.size == 0:
        raise ValueError("empty observation grid")
    base = rng if isinstance(rng, SeededRng) else SeededRng(int(rng))

    def one(rep: int) -> float:
        model_hist = _model_histograms(model, times, n_paths, base.spawn(rep))
        return float(np.mean(_hellinger_rows(target_hist, model_hist)))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(one, range(repetitions)))
    else:
        values = [one(r) for r in range(repetitions)]
    values = np.array(values)
    return HellingerReport(float(values.mean()), float(values.std()), repetitions, int(times.size))
