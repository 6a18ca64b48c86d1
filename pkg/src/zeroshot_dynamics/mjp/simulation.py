"""Jump-process simulation and analysis: ratchet generator, Gillespie sampling,
transient and stationary distributions, and entropy production."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg
from scipy.stats import poisson

from ..core import as_generator, check_generator, check_prob_vector

__all__ = [
    "Trajectory",
    "dfr_generator",
    "gillespie_sample",
    "sample_on_grid",
    "observe_on_grid",
    "master_equation_solve",
    "stationary_distribution",
    "relaxation_times",
    "mean_first_passage_times",
    "entropy_production_rate",
    "total_entropy_production",
    "InfiniteEntropyProductionError",
    "NonUniqueStationaryError",
]


class InfiniteEntropyProductionError(ValueError):
    pass


class NonUniqueStationaryError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Right-continuous piecewise-constant path: ``states[i]`` holds on ``[jump_times[i], jump_times[i+1])``."""

    jump_times: np.ndarray
    states: np.ndarray
    horizon: float

    def state_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < 0) or np.any(t > self.horizon):
            raise ValueError(f"observation time outside [0, {self.horizon}]")
        idx = np.searchsorted(self.jump_times, t, side="right") - 1
        return self.states[idx]


def dfr_generator(v: float, r: float, b: float) -> np.ndarray:
    """Six-state discrete flashing ratchet generator.

    States are ordered ``1on, 2on, 3on, 1off, 2off, 3off``. Within the on
    sector ``Q[i, j] = exp(-v (j - i) / 2)``, within the off sector the rate is
    ``b``, and corresponding on/off states switch at rate ``r``.
    """
    if r <= 0 or b <= 0:
        raise ValueError("switching rate r and diffusion rate b must be positive")
    q = np.zeros((6, 6))
    for i in range(3):
        for j in range(3):
            if i != j:
                q[i, j] = math.exp(-0.5 * v * (j - i))
                q[3 + i, 3 + j] = b
        q[i, 3 + i] = r
        q[3 + i, i] = r
    q[np.diag_indices(6)] = -q.sum(axis=1)
    return q


def _jump_chain(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exit rates and cumulative jump probabilities (rows of absorbing states are unused)."""
    off = np.where(np.eye(q.shape[0], dtype=bool), 0.0, q)
    rates = off.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        probs = np.where(rates[:, None] > 0, off / rates[:, None], 0.0)
    cum = np.cumsum(probs, axis=1)
    cum[rates > 0, -1] = 1.0
    return rates, cum


def _next_states(cum: np.ndarray, states: np.ndarray, u: np.ndarray) -> np.ndarray:
    nxt = (u[:, None] >= cum[states]).sum(axis=1)
    return np.minimum(nxt, cum.shape[1] - 1)


def gillespie_sample(q, init, horizon: float, rng) -> Trajectory:
    """Exact trajectory on ``[0, horizon]``; an absorbing state holds forever."""
    q = check_generator(q)
    init = check_prob_vector(init, q.shape[0])
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    gen = as_generator(rng)
    rates, cum = _jump_chain(q)
    state = int(gen.choice(q.shape[0], p=init))
    times, states = [0.0], [state]
    t = 0.0
    while rates[state] > 0:
        t += gen.exponential(1.0 / rates[state])
        if t > horizon:
            break
        state = int(_next_states(cum, np.array([state]), np.array([gen.random()]))[0])
        times.append(t)
        states.append(state)
    return Trajectory(np.array(times), np.array(states, dtype=np.int64), float(horizon))


def observe_on_grid(traj: Trajectory, grid) -> np.ndarray:
    """States of the right-continuous path at each grid time."""
    grid = np.asarray(grid, dtype=np.float64)
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be nondecreasing")
    return traj.state_at(grid)


def sample_on_grid(q, init, grid, n_paths: int | None = None, rng=None) -> np.ndarray:
    """Simulate many Gillespie paths at once and record them on observation grids.

    ``grid`` is either one shared sorted grid of length ``L`` (then
    ``n_paths`` is required) or a ``(P, L)`` array of per-path sorted grids.
    Holding times and jumps are drawn exactly as in :func:`gillespie_sample`,
    vectorised across paths; a jump landing exactly on a grid time is
    recorded (right continuity).

    Returns
    -------
    ndarray of int, shape (P, L)
    """
    q = check_generator(q)
    init = check_prob_vector(init, q.shape[0])
    gen = as_generator(rng)
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim == 1:
        if n_paths is None:
            raise ValueError("n_paths is required with a shared grid")
        shared = True
        n = int(n_paths)
    else:
        shared = False
        n = grid.shape[0]
    if np.any(grid < 0):
        raise ValueError("grid times must be >= 0")
    if np.any(np.diff(grid, axis=-1) < 0):
        raise ValueError("grids must be nondecreasing")
    n_obs = grid.shape[-1]

    rates, cum = _jump_chain(q)
    state = gen.choice(q.shape[0], size=n, p=init)
    with np.errstate(divide="ignore"):
        scale = np.where(rates > 0, 1.0 / np.where(rates > 0, rates, 1.0), np.inf)
    next_jump = gen.exponential(1.0, size=n) * scale[state]
    out = np.empty((n, n_obs), dtype=np.int64)
    for col in range(n_obs):
        g = grid[col] if shared else grid[:, col]
        while True:
            due = np.flatnonzero(next_jump <= g)
            if due.size == 0:
                break
            s = _next_states(cum, state[due], gen.random(due.size))
            state[due] = s
            next_jump[due] += gen.exponential(1.0, size=due.size) * scale[s]
        out[:, col] = state
    return out


def master_equation_solve(q, init, t: float, tol: float = 1e-12) -> np.ndarray:
    """Transient distribution ``init @ expm(q t)`` by uniformization.

    The Poisson series is truncated once the neglected tail mass is below
    ``tol``; because every term is a probability vector, the per-entry error
    is bounded by that tail mass.
    """
    q = check_generator(q)
    p = check_prob_vector(init, q.shape[0]).copy()
    if t < 0:
        raise ValueError("t must be >= 0")
    lam = float(np.max(-np.diag(q)))
    if t == 0 or lam <= 0:
        return p
    kernel = np.eye(q.shape[0]) + q / lam
    mu = lam * t
    n_terms = int(poisson.isf(tol, mu)) + 2
    weights = poisson.pmf(np.arange(n_terms), mu)
    acc = np.zeros_like(p)
    v = p
    for w in weights:
        acc += w * v
        v = v @ kernel
    # renormalise the truncated tail
    acc = np.maximum(acc, 0.0)
    return acc / acc.sum()


def stationary_distribution(q) -> np.ndarray:
    """Unique normalised left null vector of ``q``.

    Raises
    ------
    NonUniqueStationaryError
        If the null space of ``q.T`` is not one-dimensional.
    """
    q = check_generator(q)
    k = q.shape[0]
    scale = max(float(np.abs(q).max()), 1e-300)
    ns = scipy.linalg.null_space(q.T / scale, rcond=1e-10)
    if ns.shape[1] != 1:
        raise NonUniqueStationaryError(f"non-unique stationary distribution (null space dim {ns.shape[1]})")
    # refine with a normalisation-augmented least-squares solve
    a = np.vstack([q.T / scale, np.ones((1, k))])
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    pi = np.maximum(pi, 0.0)
    return pi / pi.sum()


def relaxation_times(q) -> np.ndarray:
    """``-1 / Re(lambda)`` for every eigenvalue with negative real part, in descending order."""
    q = check_generator(q)
    ev = np.linalg.eigvals(q)
    re = ev.real[ev.real < -1e-12]
    return np.sort(-1.0 / re)[::-1]


def _reaches(q: np.ndarray, target: int) -> np.ndarray:
    k = q.shape[0]
    adj = (q > 0) & ~np.eye(k, dtype=bool)
    ok = np.zeros(k, dtype=bool)
    ok[target] = True
    frontier = [target]
    while frontier:
        j = frontier.pop()
        for i in np.flatnonzero(adj[:, j] & ~ok):
            ok[i] = True
            frontier.append(i)
    return ok


def mean_first_passage_times(q, target_state: int) -> np.ndarray:
    """Expected hitting time of ``target_state`` from every state (0 for the target)."""
    q = check_generator(q)
    k = q.shape[0]
    if not 0 <= target_state < k:
        raise ValueError("target_state out of range")
    if not _reaches(q, target_state).all():
        raise ValueError(f"state {target_state} is not reachable from every state")
    rest = np.array([i for i in range(k) if i != target_state], dtype=np.int64)
    out = np.zeros(k)
    if rest.size:
        out[rest] = np.linalg.solve(-q[np.ix_(rest, rest)], np.ones(rest.size))
    return out


def entropy_production_rate(q, p, flux_floor: float | None = None) -> float:
    """Instantaneous total entropy production ``1/2 sum_ij (J_ij - J_ji) log(J_ij / J_ji)``.

    ``J_ij = p_i Q_ij``. Pairs where both fluxes are below 1e-300 contribute
    nothing. A one-sided zero flux makes the rate infinite and raises, unless
    ``flux_floor`` is given, in which case fluxes are floored at that value.
    """
    q = check_generator(q)
    p = check_prob_vector(p, q.shape[0])
    flux = p[:, None] * q
    k = q.shape[0]
    total = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            a, b = flux[i, j], flux[j, i]
            if a < 1e-300 and b < 1e-300:
                continue
            if flux_floor is not None:
                a, b = max(a, flux_floor), max(b, flux_floor)
            elif a <= 0 or b <= 0:
                raise InfiniteEntropyProductionError(
                    f"infinite entropy production: one-sided flux between states {i} and {j}"
                )
            # the two ordered pairs give identical terms; together they cancel the 1/2
            total += (a - b) * math.log(a / b)
    return float(max(total, 0.0))


def total_entropy_production(q, init, horizon: float, n_quad: int = 201, flux_floor: float | None = None) -> float:
    """Entropy produced on ``[0, horizon]``: composite Simpson rule over the master-equation solution."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if n_quad < 2:
        raise ValueError("n_quad must be >= 2")
    ts = np.linspace(0.0, horizon, n_quad)
    rates = np.array([entropy_production_rate(q, master_equation_solve(q, init, t), flux_floor) for t in ts])
    return float(scipy.integrate.simpson(rates, x=ts))

