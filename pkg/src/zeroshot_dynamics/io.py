"""JSON Lines readers and writers for event, MJP and panel datasets.

Event datasets::

    {"num_marks": K}
    {"times": [...], "marks": [...]}
    ...

MJP datasets use a ``{"n_states": K}`` header followed by ``{"grid": [...],
"states": [...]}`` rows; a truth sidecar is a single JSON object ``{"Q": [[...]],
"pi0": [...]}``. Panel files hold one object per panel,
``{"times": [...], "values": [[...]], "mask": [[...]]}``, with ``null`` for
missing values.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .core import (
    EventSequence,
    MalformedDataError,
    MjpObservationSet,
    TimeSeriesPanel,
    check_generator,
    check_prob_vector,
    validate_event_sequence,
)


class DataError(ValueError):
    """A dataset file is missing, unreadable or violates its schema."""


def dumps(obj) -> str:
    """Deterministic compact JSON; floats use the shortest round-trip repr."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _read_lines(path) -> list[dict]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise DataError(f"{path}:{lineno}: expected a JSON object")
        rows.append(obj)
    return rows


def _write_lines(path, rows: Iterable[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for row in rows:
            fh.write(dumps(row) + "\n")


def _split_header(rows: list[dict], key: str, path) -> tuple[int, list[dict]]:
    header = [r for r in rows if key in r]
    if len(header) != 1:
        raise DataError(f"{path}: expected exactly one header line with {key!r}")
    value = header[0][key]
    if not isinstance(value, int) or value < 1:
        raise DataError(f"{path}: {key} must be a positive integer")
    return value, [r for r in rows if key not in r]


# -- events -----------------------------------------------------------------


def write_event_dataset(path, sequences: list[EventSequence], num_marks: int | None = None) -> None:
    if num_marks is None:
        num_marks = sequences[0].num_marks if sequences else 1
    _write_lines(path, [{"num_marks": int(num_marks)}] + [s.to_dict() for s in sequences])


def read_event_dataset(path) -> tuple[list[EventSequence], int]:
    """Load an event dataset; sequences violating the invariants are rejected."""
    k, body = _split_header(_read_lines(path), "num_marks", path)
    seqs = []
    for i, row in enumerate(body):
        try:
            seq = EventSequence(row["times"], row["marks"], k)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: sequence {i}: malformed ({exc})") from exc
        res = validate_event_sequence(seq)
        if not res.ok:
            raise DataError(f"{path}: sequence {i}: " + "; ".join(res.violations[:3]))
        seqs.append(seq)
    return seqs, k


# -- MJP --------------------------------------------------------------------


def write_mjp_dataset(path, obs: MjpObservationSet) -> None:
    rows = [{"n_states": obs.n_states}]
    for p in range(obs.n_paths):
        g, s = obs.path(p)
        rows.append({"grid": g.tolist(), "states": s.tolist()})
    _write_lines(path, rows)


def read_mjp_dataset(path) -> MjpObservationSet:
    k, body = _split_header(_read_lines(path), "n_states", path)
    try:
        obs = MjpObservationSet.from_paths([r["grid"] for r in body], [r["states"] for r in body], k)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed MJP rows ({exc})") from exc
    res = obs.validate()
    if not res.ok:
        raise DataError(f"{path}: " + "; ".join(res.violations[:3]))
    return obs


def write_truth(path, q, pi0) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps({"Q": np.asarray(q).tolist(), "pi0": np.asarray(pi0).tolist()}) + "\n")


def read_truth(path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
        q = check_generator(np.array(obj["Q"], dtype=np.float64))
        pi0 = check_prob_vector(np.array(obj["pi0"], dtype=np.float64), q.shape[0])
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: invalid truth sidecar ({exc})") from exc
    return q, pi0


# -- panels -----------------------------------------------------------------


def _to_nulls(a: np.ndarray) -> list:
    return [[None if not math.isfinite(v) else v for v in row] for row in a.tolist()]


def panel_to_dict(panel: TimeSeriesPanel) -> dict:
    return {
        "times": panel.times.tolist(),
        "values": _to_nulls(panel.values),
        "mask": panel.prediction_mask.tolist(),
    }


def panel_from_dict(obj: dict) -> TimeSeriesPanel:
    values = np.array(
        [[np.nan if v is None else float(v) for v in row] for row in obj["values"]], dtype=np.float64
    )
    return TimeSeriesPanel(values, obj["times"], obj.get("mask"))


def write_panels(path, panels: list[TimeSeriesPanel]) -> None:
    _write_lines(path, [panel_to_dict(p) for p in panels])


def read_panels(path) -> list[TimeSeriesPanel]:
    panels = []
    for i, row in enumerate(_read_lines(path)):
        try:
            panel = panel_from_dict(row)
        except (KeyError, TypeError, ValueError, MalformedDataError) as exc:
            raise DataError(f"{path}: panel {i}: malformed ({exc})") from exc
        res = panel.validate()
        if not res.ok:
            raise DataError(f"{path}: panel {i}: " + "; ".join(res.violations))
        panels.append(panel)
    return panels
