from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Benchmark configuration is incomplete or inconsistent."""


TASKS = ("tpp", "mjp", "imputation")


@dataclass
class BenchmarkConfig:
    """Options for one benchmark run; fields irrelevant to ``task`` are ignored.

    ``datasets`` entries are dicts. TPP: ``{"name", "context", "test"}`` (a
    lone ``"path"`` is split into context and test halves). MJP:
    ``{"name", "path", "truth"?, "target"?, "dfr"?}``. Imputation:
    ``{"name", "path"}``.
    """

    task: str
    datasets: list = field(default_factory=list)
    seed: int = 0
    threads: int = 1
    out: str | None = None
    # tpp
    horizon: int = 5
    variant: str = "evil"
    otd_del_cost: float = 1.0
    prefix_policy: str = "last_n"  # or "window"
    window: int = 20
    context_fraction: float = 0.5
    fitness_lambda: float = 1.0
    # mjp
    simulate_dfr: list | None = None  # [V, r, b, paths, obs]
    dfr_horizon: float = 2.5
    dfr_noise: float = 0.0
    hellinger_paths: int = 100_000
    hellinger_target_paths: int = 100_000
    hellinger_repetitions: int = 100
    hellinger_target: str = "heldout"  # or "same"
    v_sweep: list = field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0])
    entropy_n_quad: int = 201
    # imputation
    holdout_fraction: float | None = None
    holdout_mode: str | None = None  # "pointwise" | "window" | None (use file masks)
    large_gap_threshold: int = 4
    context_size: int = 8

    def validate(self) -> "BenchmarkConfig":
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.task == "tpp":
            if not self.datasets:
                raise ConfigError("tpp benchmark needs at least one dataset")
            if self.horizon < 1:
                raise ConfigError("horizon must be >= 1")
            if self.variant not in ("evil", "synthetic-prior"):
                raise ConfigError(f"unknown variant {self.variant!r}")
            if self.otd_del_cost <= 0:
                raise ConfigError("otd deletion cost must be positive")
            if self.prefix_policy not in ("last_n", "window"):
                raise ConfigError(f"unknown prefix policy {self.prefix_policy!r}")
            for d in self.datasets:
                if "context" not in d and "path" not in d:
                    raise ConfigError(f"tpp dataset {d!r} needs 'context'/'test' or 'path'")
        elif self.task == "mjp":
            if not self.datasets and self.simulate_dfr is None:
                raise ConfigError("mjp benchmark needs datasets or simulate_dfr")
            if self.simulate_dfr is not None and len(self.simulate_dfr) != 5:
                raise ConfigError("simulate_dfr takes V r b paths obs")
            if self.hellinger_target not in ("heldout", "same"):
                raise ConfigError("hellinger_target must be 'heldout' or 'same'")
            if self.hellinger_repetitions < 1 or self.hellinger_paths < 1:
                raise ConfigError("hellinger repetitions and paths must be >= 1")
            for d in self.datasets:
                if "path" not in d:
                    raise ConfigError(f"mjp dataset {d!r} needs 'path'")
        else:
            if not self.datasets:
                raise ConfigError("imputation benchmark needs at least one dataset")
            if self.holdout_mode not in (None, "pointwise", "window"):
                raise ConfigError(f"unknown holdout mode {self.holdout_mode!r}")
            if self.holdout_mode is not None:
                f = self.holdout_fraction
                if f is None or not 0 < f < 1:
                    raise ConfigError("holdout_fraction in (0, 1) is required with a holdout mode")
            for d in self.datasets:
                if "path" not in d:
                    raise ConfigError(f"imputation dataset {d!r} needs 'path'")
        for i, d in enumerate(self.datasets):
            d.setdefault("name", Path(d.get("path") or d.get("test") or d.get("context")).stem or f"dataset{i}")
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")
        d.pop("threads")  # results do not depend on it
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "task" not in d:
            raise ConfigError("config needs a 'task'")
        return cls(**d)


def load_config(path) -> dict:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    return obj
