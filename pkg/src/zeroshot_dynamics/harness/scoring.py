"""Fitness scores and metric (re-)derivation from persisted predictions."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from pathlib import Path

import numpy as np

from ..core import EventSequence
from ..io import DataError
from ..mjp.estimation import MjpEstimate, cross_entropy, extract_dfr_parameters, offdiag_rmse
from ..mjp.simulation import (
    InfiniteEntropyProductionError,
    NonUniqueStationaryError,
    entropy_production_rate,
    stationary_distribution,
)
from ..tpp.metrics import evaluate_forecasts


def tpp_fitness(acc: float, rmse_dt: float, lam: float = 1.0) -> float:
    return acc - lam * rmse_dt


def imputation_fitness(maes) -> float:
    maes = list(maes)
    if not maes:
        raise ValueError("imputation fitness needs at least one dataset MAE")
    return -math.fsum(maes) / len(maes)


def tpp_metrics(rows: list[dict], num_marks: int, del_cost: float, lam: float) -> dict:
    pred = [EventSequence(r["pred"]["times"], r["pred"]["marks"], num_marks) for r in rows]
    truth = [EventSequence(r["truth"]["times"], r["truth"]["marks"], num_marks) for r in rows]
    anchors = [r["history_last_time"] for r in rows]
    rep = evaluate_forecasts(pred, truth, anchors, num_marks, del_cost).to_dict()
    rep["fitness"] = tpp_fitness(rep["acc"], rep["rmse_dt"], lam)
    return rep


def stationary_entropy(q) -> float | str:
    """Entropy production rate at stationarity, or a skip reason."""
    try:
        return entropy_production_rate(q, stationary_distribution(q))
    except (InfiniteEntropyProductionError, NonUniqueStationaryError) as exc:
        return f"skipped: {exc}"


def mjp_metrics(row: dict) -> dict:
    est = MjpEstimate(np.array(row["q"]), np.array(row["init"]), row["typical_dt"])
    out: dict = {"n_states": est.n_states, "entropy_rate_estimate": stationary_entropy(est.q)}
    if "truth_q" in row:
        tq = np.array(row["truth_q"])
        ce = cross_entropy(row["truth_init"], est.init)
        rmse = offdiag_rmse(est.q, tq)
        out.update(cross_entropy=ce, rmse_q=rmse, fitness=-(ce + rmse), entropy_rate_truth=stationary_entropy(tq))
    if "dfr_truth" in row and est.n_states == 6:
        v, r, b = extract_dfr_parameters(est.q)
        tv, tr, tb = row["dfr_truth"]
        out["dfr_params"] = [v, r, b]
        out["dfr_ratios"] = [v / tv if tv else float("nan"), r / tr, b / tb]
    return out


def imputation_metrics(rows: list[dict]) -> dict:
    err = [abs(p - t) for r in rows for p, t in zip(r["pred"], r["truth"])]
    base = [abs(p - t) for r in rows for p, t in zip(r["baseline"], r["truth"])]
    if not err:
        return {"n_scored": 0, "mae": "skipped: nothing to score", "mae_interpolation_baseline": "skipped"}
    return {
        "n_scored": len(err),
        "mae": math.fsum(err) / len(err),
        "mae_interpolation_baseline": math.fsum(base) / len(base),
    }


def score_predictions(path) -> dict:
    """Recompute every prediction-derived metric from a ``predictions.jsonl`` file."""
    path = Path(path)
    try:
        lines = [json.loads(x) for x in path.read_text().splitlines() if x.strip()]
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read predictions {path}: {exc}") from exc
    if not lines or "task" not in lines[0]:
        raise DataError(f"{path}: missing predictions header")
    meta, rows = lines[0], lines[1:]
    by_ds: dict[str, list[dict]] = defaultdict(list)
    for r in rows:
        by_ds[r["dataset"]].append(r)
    task = meta["task"]
    results = {}
    if task == "tpp":
        for name, rs in by_ds.items():
            results[name] = tpp_metrics(rs, meta["num_marks"][name], meta["otd_del_cost"], meta["fitness_lambda"])
    elif task == "mjp":
        for name, rs in by_ds.items():
            results[name] = mjp_metrics(rs[0])
    elif task == "imputation":
        for name, rs in by_ds.items():
            results[name] = imputation_metrics(rs)
    else:
        raise DataError(f"{path}: unknown task {task!r}")
    return {"task": task, "results": results}
