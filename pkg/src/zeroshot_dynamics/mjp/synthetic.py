"""Synthetic jump-process datasets: random connected generators and the ratchet benchmark."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import MjpObservationSet, as_generator, check_generator, check_prob_vector
from .simulation import dfr_generator, sample_on_grid, stationary_distribution

__all__ = [
    "SyntheticMjpConfig",
    "DfrConfig",
    "random_connected_adjacency",
    "random_generator",
    "make_observation_grids",
    "corrupt_states",
    "generate_synthetic_mjp",
    "simulate_dfr_dataset",
]

DEFAULT_BETA_FAMILY = ((1.0, 2.0), (2.0, 2.0), (2.0, 5.0))


@dataclass(frozen=True)
class SyntheticMjpConfig:
    """Sampling recipe for one synthetic jump process and its observations.

    Each path is observed at ``n_obs <= max_grid_points`` times on
    ``[0, horizon]`` (see :func:`make_observation_grids`).
    """

    k_min: int = 2
    k_max: int = 6
    beta_family: tuple = DEFAULT_BETA_FAMILY
    rate_scale: float = 10.0
    extra_edge_prob: float = 0.5
    init_mode: str = "mixed"  # "stationary", "dirichlet" or "mixed" (coin flip)
    dirichlet_concentration: float = 1.0
    horizon: float = 10.0
    max_grid_points: int = 100
    grid_mode: str = "irregular"
    n_obs: int = 100
    corruption: float = 0.01
    n_paths: int = 300

    def __post_init__(self):
        if not 1 <= self.k_min <= self.k_max:
            raise ValueError("need 1 <= k_min <= k_max")
        if self.rate_scale <= 0 or self.horizon <= 0 or self.dirichlet_concentration <= 0:
            raise ValueError("rate_scale, horizon and dirichlet_concentration must be positive")
        if not 0 <= self.corruption < 1:
            raise ValueError("corruption must lie in [0, 1)")
        if not 0 <= self.extra_edge_prob <= 1:
            raise ValueError("extra_edge_prob must lie in [0, 1]")
        if self.init_mode not in ("stationary", "dirichlet", "mixed"):
            raise ValueError(f"unknown init_mode {self.init_mode!r}")
        if self.grid_mode not in ("regular", "irregular"):
            raise ValueError(f"unknown grid_mode {self.grid_mode!r}")
        if self.n_paths < 1 or not 1 <= self.n_obs <= self.max_grid_points:
            raise ValueError("need n_paths >= 1 and 1 <= n_obs <= max_grid_points")
        if any(a <= 0 or b <= 0 for a, b in self.beta_family) or not self.beta_family:
            raise ValueError("beta_family needs positive shape pairs")


def random_connected_adjacency(k: int, extra_edge_prob: float, rng) -> np.ndarray:
    """Symmetric adjacency: a uniform random spanning tree plus independently kept extra edges."""
    gen = as_generator(rng)
    adj = np.zeros((k, k), dtype=bool)
    if k == 1:
        return adj
    # Aldous-Broder random walk on the complete graph yields a uniform spanning tree
    visited = np.zeros(k, dtype=bool)
    cur = int(gen.integers(k))
    visited[cur] = True
    while not visited.all():
        nxt = int(gen.integers(k - 1))
        nxt += nxt >= cur
        if not visited[nxt]:
            adj[cur, nxt] = adj[nxt, cur] = True
            visited[nxt] = True
        cur = nxt
    iu = np.triu_indices(k, 1)
    extra = gen.random(iu[0].size) < extra_edge_prob
    adj[iu[0][extra], iu[1][extra]] = True
    adj |= adj.T
    return adj


def random_generator(k: int, cfg: SyntheticMjpConfig, rng) -> np.ndarray:
    gen = as_generator(rng)
    adj = random_connected_adjacency(k, cfg.extra_edge_prob, gen)
    a, b = cfg.beta_family[int(gen.integers(len(cfg.beta_family)))]
    q = np.zeros((k, k))
    q[adj] = cfg.rate_scale * gen.beta(a, b, size=int(adj.sum()))
    q[np.diag_indices(k)] = -q.sum(axis=1)
    return q


def make_observation_grids(n_paths: int, horizon: float, n_obs: int, mode: str, rng) -> np.ndarray:
    """``(n_paths, n_obs)`` observation times on ``[0, horizon]``.

    ``"regular"`` repeats one evenly spaced grid; ``"irregular"`` draws, per
    path, time 0 plus ``n_obs - 1`` sorted uniform times.
    """
    if mode == "regular":
        return np.tile(np.linspace(0.0, horizon, n_obs), (n_paths, 1))
    if mode != "irregular":
        raise ValueError(f"unknown grid mode {mode!r}")
    gen = as_generator(rng)
    draws = np.sort(gen.uniform(0.0, horizon, size=(n_paths, n_obs - 1)), axis=1)
    return np.concatenate([np.zeros((n_paths, 1)), draws], axis=1)


def corrupt_states(values: np.ndarray, n_states: int, fraction: float, rng) -> np.ndarray:
    """Replace each entry, with probability ``fraction``, by a uniformly chosen different state."""
    gen = as_generator(rng)
    values = np.array(values, dtype=np.int64)
    if fraction <= 0 or n_states < 2:
        return values
    hit = gen.random(values.shape) < fraction
    shift = gen.integers(1, n_states, size=int(hit.sum()))
    values[hit] = (values[hit] + shift) % n_states
    return values


def generate_synthetic_mjp(cfg: SyntheticMjpConfig, rng):
    """Draw a random generator, an initial distribution and noisy grid observations.

    Returns
    -------
    q : ndarray (K, K)
    pi0 : ndarray (K,)
    obs : MjpObservationSet
    """
    gen = as_generator(rng)
    k = int(gen.integers(cfg.k_min, cfg.k_max + 1))
    q = random_generator(k, cfg, gen)
    mode = cfg.init_mode
    if mode == "mixed":
        mode = "stationary" if gen.random() < 0.5 else "dirichlet"
    if mode == "stationary":
        pi0 = stationary_distribution(q)
    else:
        pi0 = gen.dirichlet(np.full(k, cfg.dirichlet_concentration))
    grids = make_observation_grids(cfg.n_paths, cfg.horizon, cfg.n_obs, cfg.grid_mode, gen)
    values = sample_on_grid(q, pi0, grids, rng=gen)
    values = corrupt_states(values, k, cfg.corruption, gen)
    obs = MjpObservationSet(grids, values, np.full(cfg.n_paths, grids.shape[1]), k)
    return q, pi0, obs


@dataclass(frozen=True)
class DfrConfig:
    """Ratchet benchmark: ``n_paths`` paths with ``n_obs`` observations each on ``[0, horizon]``."""

    v: float = 1.0
    r: float = 1.0
    b: float = 1.0
    n_paths: int = 5000
    n_obs: int = 50
    horizon: float = 2.5
    init: tuple | None = None  # uniform when None
    corruption: float = 0.0
    grid_mode: str = "irregular"

    def generator(self) -> np.ndarray:
        return dfr_generator(self.v, self.r, self.b)

    def initial_distribution(self) -> np.ndarray:
        if self.init is None:
            return np.full(6, 1.0 / 6.0)
        return check_prob_vector(np.array(self.init, dtype=np.float64), 6)


def simulate_dfr_dataset(
    cfg: DfrConfig, rng, n_paths: int | None = None, shared_grid: bool = False
) -> MjpObservationSet:
    """Simulate ratchet observations; ``shared_grid`` draws one grid used by every path.

    A shared grid is what histogram comparisons need: every grid time then
    pools all paths.
    """
    gen = as_generator(rng)
    n = cfg.n_paths if n_paths is None else int(n_paths)
    q = check_generator(cfg.generator())
    if shared_grid:
        grids = np.repeat(make_observation_grids(1, cfg.horizon, cfg.n_obs, cfg.grid_mode, gen), n, axis=0)
    else:
        grids = make_observation_grids(n, cfg.horizon, cfg.n_obs, cfg.grid_mode, gen)
    values = sample_on_grid(q, cfg.initial_distribution(), grids, rng=gen)
    values = corrupt_states(values, 6, cfg.corruption, gen)
    return MjpObservationSet(grids, values, np.full(n, grids.shape[1]), 6)
