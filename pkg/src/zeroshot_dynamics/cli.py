"""Command-line entry point: ``zeroshot-dynamics <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import MalformedDataError, SeededRng
from .harness.config import BenchmarkConfig, ConfigError, load_config
from .harness.runners import run_benchmark
from .harness.scoring import score_predictions
from .io import DataError, write_mjp_dataset, write_truth
from .mjp.synthetic import DfrConfig, SyntheticMjpConfig, generate_synthetic_mjp, simulate_dfr_dataset


EXIT_CONFIG = 2
EXIT_DATA = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config; flags given on the command line override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="output directory for report.json, report.txt, timings.json, predictions.jsonl")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zeroshot-dynamics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tpp", help="next-event prediction benchmark")
    _common(p)
    p.add_argument("--data", action="append", help="event dataset split into context/test by --context-fraction")
    p.add_argument("--context", help="context split (used with --test)")
    p.add_argument("--test", help="test split (used with --context)")
    p.add_argument("--horizon", type=int)
    p.add_argument("--variant", choices=["evil", "synthetic-prior"])
    p.add_argument("--del-cost", dest="otd_del_cost", type=float)
    p.add_argument("--prefix-policy", choices=["last_n", "window"])
    p.add_argument("--window", type=int)
    p.add_argument("--context-fraction", type=float)
    p.add_argument("--fitness-lambda", type=float)

    p = sub.add_parser("mjp", help="jump-process estimation benchmark")
    _common(p)
    p.add_argument("--data", action="append", help="MJP dataset; pair with --truth in the same order")
    p.add_argument("--truth", action="append", help="truth sidecar for the matching --data")
    p.add_argument("--simulate-dfr", nargs=5, type=float, metavar=("V", "r", "b", "paths", "obs"))
    p.add_argument("--dfr-horizon", type=float)
    p.add_argument("--dfr-noise", type=float)
    p.add_argument("--hellinger-paths", type=int)
    p.add_argument("--hellinger-target-paths", type=int)
    p.add_argument("--hellinger-repetitions", type=int)
    p.add_argument("--hellinger-target", choices=["heldout", "same"])
    p.add_argument("--v-sweep", nargs="*", type=float, help="voltages for the entropy sweep (none disables)")

    p = sub.add_parser("impute", help="imputation benchmark")
    _common(p)
    p.add_argument("--data", action="append", help="panel file")
    p.add_argument("--holdout-fraction", type=float)
    p.add_argument("--holdout-mode", choices=["pointwise", "window"])
    p.add_argument("--large-gap-threshold", type=int)
    p.add_argument("--context-size", type=int)

    p = sub.add_parser("simulate-dfr", help="write a simulated ratchet dataset and its truth sidecar")
    p.add_argument("params", nargs=5, type=float, metavar=("V", "r", "b", "paths", "obs"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=DfrConfig.horizon)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("generate-mjp", help="write random synthetic MJP datasets with truth sidecars")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--paths", type=int, default=SyntheticMjpConfig.n_paths)
    p.add_argument("--obs", type=int, default=SyntheticMjpConfig.n_obs)
    p.add_argument("--horizon", type=float, default=SyntheticMjpConfig.horizon)
    p.add_argument("--noise", type=float, default=SyntheticMjpConfig.corruption)
    p.add_argument("--grid", choices=["regular", "irregular"], default="irregular")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("score", help="re-derive metrics from a predictions.jsonl file")
    p.add_argument("predictions")
    return parser


_TASK = {"tpp": "tpp", "mjp": "mjp", "impute": "imputation"}
_SKIP = {"command", "config", "data", "context", "test", "truth"}


def _benchmark_config(args) -> BenchmarkConfig:
    raw = load_config(args.config) if args.config else {}
    task = _TASK[args.command]
    if raw.setdefault("task", task) != task:
        raise ConfigError(f"config task {raw['task']!r} does not match subcommand {args.command!r}")
    datasets = list(raw.get("datasets", []))
    if args.command == "tpp":
        datasets += [{"path": d} for d in args.data or []]
        if args.context or args.test:
            if not (args.context and args.test):
                raise ConfigError("--context and --test go together")
            datasets.append({"context": args.context, "test": args.test})
    elif args.command == "mjp":
        truths = args.truth or []
        if len(truths) > len(args.data or []):
            raise ConfigError("more --truth files than --data files")
        for i, d in enumerate(args.data or []):
            datasets.append({"path": d, **({"truth": truths[i]} if i < len(truths) else {})})
    else:
        datasets += [{"path": d} for d in args.data or []]
    raw["datasets"] = datasets
    for key, val in vars(args).items():
        if key not in _SKIP and val is not None:
            raw[key] = val
    if raw.get("simulate_dfr") is not None:
        v, r, b, paths, n_obs = raw["simulate_dfr"]
        raw["simulate_dfr"] = [float(v), float(r), float(b), int(paths), int(n_obs)]
    try:
        return BenchmarkConfig.from_dict(raw).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _simulate_dfr(args) -> None:
    v, r, b, paths, n_obs = args.params
    cfg = DfrConfig(v=v, r=r, b=b, n_paths=int(paths), n_obs=int(n_obs), horizon=args.horizon, corruption=args.noise)
    obs = simulate_dfr_dataset(cfg, SeededRng(args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_mjp_dataset(out / "dfr.jsonl", obs)
    write_truth(out / "dfr_truth.json", cfg.generator(), cfg.initial_distribution())
    print(f"wrote {obs.n_paths} paths to {out / 'dfr.jsonl'}")


def _generate_mjp(args) -> None:
    try:
        cfg = SyntheticMjpConfig(
            horizon=args.horizon, n_obs=args.obs, max_grid_points=max(args.obs, 100),
            grid_mode=args.grid, corruption=args.noise, n_paths=args.paths,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = SeededRng(args.seed)
    for i in range(args.count):
        q, pi0, obs = generate_synthetic_mjp(cfg, base.spawn(i))
        write_mjp_dataset(out / f"mjp_{i:04d}.jsonl", obs)
        write_truth(out / f"mjp_{i:04d}_truth.json", q, pi0)
    print(f"wrote {args.count} datasets to {out}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in _TASK:
            cfg = _benchmark_config(args)
            report = run_benchmark(cfg)
            sys.stdout.write(report.table())
            if cfg.out:
                report.write(cfg.out)
        elif args.command == "simulate-dfr":
            _simulate_dfr(args)
        elif args.command == "generate-mjp":
            _generate_mjp(args)
        else:
            print(json.dumps(score_predictions(args.predictions), sort_keys=True, indent=2))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, MalformedDataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
