"""Shared value types, validation helpers and the seeded random stream."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "EventSequence",
    "MjpObservationSet",
    "TimeSeriesPanel",
    "SeededRng",
    "ValidationResult",
    "MalformedDataError",
    "validate_event_sequence",
    "validate_generator",
    "validate_prob_vector",
    "check_generator",
    "check_prob_vector",
]


class MalformedDataError(ValueError):
    """Raised when input data cannot be interpreted at all (wrong shapes, etc.)."""


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EventSequence:
    """Marked event sequence: strictly increasing times with integer marks in ``[0, num_marks)``.

    Construction does not enforce the invariants; use
    :func:`validate_event_sequence` (the loaders reject invalid sequences).
    """

    times: np.ndarray
    marks: np.ndarray
    num_marks: int

    def __post_init__(self):
        object.__setattr__(self, "times", _frozen(np.array(self.times, dtype=np.float64).reshape(-1)))
        object.__setattr__(self, "marks", _frozen(np.array(self.marks, dtype=np.int64).reshape(-1)))
        object.__setattr__(self, "num_marks", int(self.num_marks))

    def __len__(self) -> int:
        return int(self.times.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventSequence):
            return NotImplemented
        return (
            self.num_marks == other.num_marks
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.marks, other.marks)
        )

    def __getitem__(self, item: slice) -> "EventSequence":
        if not isinstance(item, slice):
            raise TypeError("EventSequence supports slicing only")
        return EventSequence(self.times[item], self.marks[item], self.num_marks)

    def append(self, time: float, mark: int) -> "EventSequence":
        return EventSequence(np.append(self.times, time), np.append(self.marks, mark), self.num_marks)

    def to_dict(self) -> dict:
        return {"times": self.times.tolist(), "marks": self.marks.tolist()}


def validate_event_sequence(seq: EventSequence) -> ValidationResult:
    """Check the EventSequence invariants; violations are returned, not raised."""
    out: list[str] = []
    if seq.num_marks < 1:
        out.append(f"num_marks must be positive, got {seq.num_marks}")
    if seq.times.size != seq.marks.size:
        out.append(f"length mismatch: {seq.times.size} times vs {seq.marks.size} marks")
    if not np.all(np.isfinite(seq.times)):
        for i in np.flatnonzero(~np.isfinite(seq.times)):
            out.append(f"non-finite time at index {i}")
    bad = np.flatnonzero(np.diff(seq.times) <= 0) + 1
    for i in bad:
        out.append(f"not strictly increasing at index {i}")
    for i in np.flatnonzero((seq.marks < 0) | (seq.marks >= seq.num_marks)):
        out.append(f"mark out of range at index {i}: {seq.marks[i]}")
    return ValidationResult(tuple(out))


def validate_generator(q, rtol: float = 1e-9) -> ValidationResult:
    """Check generator invariants: nonnegative off-diagonals and zero row sums.

    Row sums must vanish within ``rtol * K * max|q|``.

    Raises
    ------
    MalformedDataError
        If ``q`` is not a square 2-d array.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise MalformedDataError(f"generator must be square, got shape {q.shape}")
    k = q.shape[0]
    out: list[str] = []
    if not np.all(np.isfinite(q)):
        out.append("non-finite entries")
        return ValidationResult(tuple(out))
    off = ~np.eye(k, dtype=bool)
    for i, j in zip(*np.nonzero((q < 0) & off)):
        out.append(f"negative off-diagonal ({i},{j})")
    tol = rtol * k * max(float(np.abs(q).max(initial=0.0)), 1e-300)
    for i, s in enumerate(q.sum(axis=1)):
        if abs(s) > tol:
            out.append(f"row {i} sum ≠ 0 ({s:.3g})")
    return ValidationResult(tuple(out))


def validate_prob_vector(p, atol: float = 1e-9) -> ValidationResult:
    p = np.asarray(p, dtype=np.float64)
    out: list[str] = []
    if p.ndim != 1 or p.size == 0:
        return ValidationResult((f"probability vector must be 1-d and nonempty, got shape {p.shape}",))
    for i in np.flatnonzero(~(p >= 0)):
        out.append(f"negative or NaN entry at index {i}")
    if abs(p.sum() - 1.0) > atol:
        out.append(f"entries sum to {p.sum():.12g}, not 1")
    return ValidationResult(tuple(out))


def check_generator(q) -> np.ndarray:
    """Return ``q`` as a float array, raising ``ValueError`` if it is not a valid generator."""
    q = np.asarray(q, dtype=np.float64)
    res = validate_generator(q)
    if not res.ok:
        raise ValueError("invalid generator: " + "; ".join(res.violations))
    return q


def check_prob_vector(p, k: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    res = validate_prob_vector(p)
    if not res.ok:
        raise ValueError("invalid probability vector: " + "; ".join(res.violations))
    if k is not None and p.size != k:
        raise ValueError(f"probability vector has {p.size} entries, expected {k}")
    return p


@dataclass(frozen=True, eq=False)
class MjpObservationSet:
    """Batch of discretely observed jump-process paths.

    Attributes
    ----------
    grid : ndarray, shape (P, L)
        Observation times, valid in the prefix ``[:seq_lengths[p]]`` of each row.
    values : ndarray of int, shape (P, L)
        Observed states.
    seq_lengths : ndarray of int, shape (P,)
    n_states : int
    """

    grid: np.ndarray
    values: np.ndarray
    seq_lengths: np.ndarray
    n_states: int

    def __post_init__(self):
        grid = np.array(self.grid, dtype=np.float64)
        values = np.array(self.values, dtype=np.int64)
        if grid.ndim == 1:
            grid = grid[None, :]
        if values.ndim == 1:
            values = values[None, :]
        if grid.shape != values.shape or grid.ndim != 2:
            raise MalformedDataError(f"grid {grid.shape} and values {values.shape} must be equal 2-d shapes")
        lengths = np.array(self.seq_lengths, dtype=np.int64).reshape(-1)
        if lengths.size != grid.shape[0]:
            raise MalformedDataError("seq_lengths must have one entry per path")
        object.__setattr__(self, "grid", _frozen(grid))
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "seq_lengths", _frozen(lengths))
        object.__setattr__(self, "n_states", int(self.n_states))

    @classmethod
    def from_paths(cls, grids: Sequence[Sequence[float]], states: Sequence[Sequence[int]], n_states: int):
        """Pack ragged per-path lists into the padded representation."""
        if len(grids) != len(states):
            raise MalformedDataError("grids and states must have the same number of paths")
        lengths = np.array([len(g) for g in grids], dtype=np.int64)
        for g, s in zip(grids, states):
            if len(g) != len(s):
                raise MalformedDataError("each path needs one state per grid time")
        width = int(lengths.max(initial=0))
        grid = np.zeros((len(grids), width))
        values = np.zeros((len(grids), width), dtype=np.int64)
        for p, (g, s) in enumerate(zip(grids, states)):
            n = len(g)
            grid[p, :n] = g
            values[p, :n] = s
            if n:
                # pad by repeating the last valid entry so np.diff stays finite
                grid[p, n:] = g[-1]
                values[p, n:] = s[-1]
        return cls(grid, values, lengths, n_states)

    @property
    def n_paths(self) -> int:
        return int(self.grid.shape[0])

    def path(self, p: int) -> tuple[np.ndarray, np.ndarray]:
        n = self.seq_lengths[p]
        return self.grid[p, :n], self.values[p, :n]

    def select(self, idx) -> "MjpObservationSet":
        idx = np.asarray(idx)
        return MjpObservationSet(self.grid[idx], self.values[idx], self.seq_lengths[idx], self.n_states)

    def validate(self) -> ValidationResult:
        out: list[str] = []
        if self.n_states < 1:
            out.append("n_states must be positive")
        width = self.grid.shape[1]
        for p in range(self.n_paths):
            n = self.seq_lengths[p]
            if n < 0 or n > width:
                out.append(f"path {p}: seq_length {n} outside [0, {width}]")
                continue
            g, s = self.path(p)
            if np.any(np.diff(g) < 0):
                out.append(f"path {p}: grid times decrease")
            if np.any((s < 0) | (s >= self.n_states)):
                out.append(f"path {p}: state out of range")
        return ValidationResult(tuple(out))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MjpObservationSet):
            return NotImplemented
        if self.n_states != other.n_states or not np.array_equal(self.seq_lengths, other.seq_lengths):
            return False
        return all(
            np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
            for a, b in ((self.path(p), other.path(p)) for p in range(self.n_paths))
        )


@dataclass(frozen=True, eq=False)
class TimeSeriesPanel:
    """``T x D`` panel; NaN marks missing values, ``prediction_mask`` marks cells to predict."""

    values: np.ndarray
    times: np.ndarray
    prediction_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise MalformedDataError("panel values must be 2-d (T, D)")
        times = np.array(self.times, dtype=np.float64).reshape(-1)
        if times.size != values.shape[0]:
            raise MalformedDataError(f"{times.size} timestamps for {values.shape[0]} rows")
        mask = self.prediction_mask
        mask = np.zeros(values.shape, dtype=bool) if mask is None else np.array(mask, dtype=bool)
        if mask.ndim == 1:
            mask = mask[:, None]
        if mask.shape != values.shape:
            raise MalformedDataError("prediction_mask must match the value shape")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "prediction_mask", _frozen(mask))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def validate(self) -> ValidationResult:
        out = []
        if np.any(np.diff(self.times) < 0):
            out.append("times decrease")
        return ValidationResult(tuple(out))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeriesPanel):
            return NotImplemented
        return (
            np.array_equal(self.values, other.values, equal_nan=True)
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.prediction_mask, other.prediction_mask)
        )


@dataclass(frozen=True)
class SeededRng:
    """Reproducible random stream keyed by ``(seed, stream)``.

    Draws come from numpy's Philox4x64 counter-based bit generator, keyed
    through ``SeedSequence([seed, stream])``; both algorithms are fixed and
    platform independent.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.seed & (2**64 - 1), self.stream & (2**64 - 1)])
        return np.random.Generator(np.random.Philox(ss))

    def spawn(self, stream: int) -> "SeededRng":
        """Derived stream for sub-task ``stream``; depends only on (seed, self.stream, stream)."""
        ss = np.random.SeedSequence([self.seed & (2**64 - 1), self.stream & (2**64 - 1), int(stream)])
        return SeededRng(self.seed, int(ss.generate_state(1, np.uint64)[0]))


def as_generator(rng) -> np.random.Generator:
    """Accept a ``SeededRng``, a numpy ``Generator`` or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return SeededRng(int(rng)).generator()
    if rng is None:
        return SeededRng(0).generator()
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")
