"""Command-line front end.

    hybefs run --config CONFIG.json [--seed N] [--workers N] [--out DIR]
    hybefs synth --samples N --features N --informative N --effect X --seed N --out FILE
    hybefs rank --data FILE --strategy NAME --out FILE

Exit status: 0 ok, 1 configuration error, 2 data error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

from hybefs import __version__
from hybefs.data import DataError, SyntheticSpec, format_real, generate_synthetic, load_csv, write_csv
from hybefs.experiment import DEFAULT_THRESHOLDS, GBMParams, run_experiment, validate_thresholds
from hybefs.strategies import StrategyError, StrategySpec, roster_by_label, run_strategy

log = logging.getLogger("hybefs")

EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 1, 2, 3

CONFIG_KEYS = {
    "dataset", "synthetic", "strategies", "n_bootstraps", "k", "thresholds",
    "seed", "workers", "out", "gbm", "write_rankings",
}


class ConfigError(ValueError):
    pass


def _default_workers() -> int:
    raw = os.environ.get("HYBEFS_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"HYBEFS_WORKERS must be an integer, got {raw!r}") from None


def resolve_strategies(entries, n_bootstraps: int) -> list[StrategySpec]:
    roster = roster_by_label(n_bootstraps)
    if entries in (None, "builtin"):
        return list(roster.values())
    if not isinstance(entries, list) or not entries:
        raise ConfigError("strategies: expected \"builtin\" or a non-empty list")
    specs = []
    for i, e in enumerate(entries):
        if isinstance(e, str):
            if e not in roster:
                raise ConfigError(f"strategies[{i}]: unknown strategy {e!r}; known: {', '.join(roster)}")
            specs.append(roster[e])
        elif isinstance(e, dict):
            try:
                specs.append(StrategySpec.from_dict(e))
            except StrategyError as exc:
                raise ConfigError(f"strategies[{i}]: {exc}") from None
        else:
            raise ConfigError(f"strategies[{i}]: expected a name or an object")
    return specs


def load_config(path, overrides: dict) -> dict:
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be an object")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"config: unknown field(s) {sorted(unknown)}")
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if ("dataset" in cfg) == ("synthetic" in cfg):
        raise ConfigError("config: give exactly one of dataset / synthetic")
    for key in ("k", "seed", "workers", "n_bootstraps"):
        if key in cfg and not isinstance(cfg[key], int):
            raise ConfigError(f"{key}: expected an integer")
    cfg.setdefault("k", 5)
    cfg.setdefault("seed", 0)
    cfg.setdefault("n_bootstraps", 50)
    cfg.setdefault("thresholds", list(DEFAULT_THRESHOLDS))
    cfg.setdefault("out", "results")
    cfg.setdefault("write_rankings", True)
    if "workers" not in cfg:
        cfg["workers"] = _default_workers()
    if cfg["k"] < 2:
        raise ConfigError("k: must be >= 2")
    if cfg["workers"] < 1:
        raise ConfigError("workers: must be >= 1")
    ths = cfg["thresholds"]
    if not isinstance(ths, list) or not ths or not all(isinstance(t, int) for t in ths):
        raise ConfigError("thresholds: expected a non-empty list of integers")
    try:
        cfg["gbm"] = asdict(GBMParams(**cfg.get("gbm", {})))
    except TypeError as exc:
        raise ConfigError(f"gbm: {exc}") from None
    return cfg


def _load_data(cfg):
    if "synthetic" in cfg:
        try:
            spec = SyntheticSpec(**cfg["synthetic"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"synthetic: {exc}") from None
        return generate_synthetic(spec)[0]
    ds = cfg["dataset"]
    if isinstance(ds, str):
        ds = {"path": ds}
    if not isinstance(ds, dict) or "path" not in ds:
        raise ConfigError("dataset: expected a path or an object with \"path\"")
    return load_csv(ds["path"], ds.get("label_column", "class"), ds.get("id_column"))


def _write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_ranking(path: Path, ranking, feature_names) -> None:
    _write_rows(
        path,
        ["rank", "feature", "score"],
        ((i + 1, feature_names[f], format_real(ranking.scores[f])) for i, f in enumerate(ranking.order)),
    )


def _safe_name(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in label)


def cmd_run(args) -> int:
    started = time.time()
    cfg = load_config(args.config, {"seed": args.seed, "workers": args.workers, "out": args.out})
    specs = resolve_strategies(cfg.get("strategies"), cfg["n_bootstraps"])
    data = _load_data(cfg)
    try:
        thresholds = validate_thresholds(cfg["thresholds"], data.n_features)
    except ValueError as exc:
        raise ConfigError(f"thresholds: {exc}") from None
    n_neg, n_pos = data.class_counts()
    if min(n_neg, n_pos) < cfg["k"]:
        raise DataError(f"each class needs at least k={cfg['k']} samples, got {n_pos}/{n_neg}")

    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    log.info("running %d strategies on %s (%d x %d)", len(specs), data.name, data.n_samples, data.n_features)
    result = run_experiment(
        data, specs, k=cfg["k"], thresholds=thresholds, seed=cfg["seed"],
        workers=cfg["workers"], gbm=GBMParams(**cfg["gbm"]),
    )
    _write_rows(
        out / "metrics.csv",
        ["dataset", "strategy", "fold", "threshold", "roc_auc", "pr_auc"],
        ((data.name, r.strategy, r.fold, r.threshold, format_real(r.roc_auc), format_real(r.pr_auc))
         for r in result.metrics),
    )
    _write_rows(
        out / "stability.csv",
        ["dataset", "strategy", "threshold", "kuncheva", "high_stability_flag"],
        ((data.name, r.strategy, r.threshold, format_real(r.kuncheva), int(r.high_stability))
         for r in result.stability),
    )
    if cfg["write_rankings"]:
        for (label, fold), output in result.rankings.items():
            d = out / "rankings" / _safe_name(label)
            d.mkdir(parents=True, exist_ok=True)
            if isinstance(output, dict):
                for th, ranking in output.items():
                    write_ranking(d / f"fold{fold}_th{th}.csv", ranking, data.feature_names)
            else:
                write_ranking(d / f"fold{fold}.csv", output, data.feature_names)
    manifest = {
        "version": __version__,
        "config": {**cfg, "strategies": [s.to_dict() for s in specs], "thresholds": thresholds},
        "seed": cfg["seed"],
        "dataset": {"name": data.name, "n_samples": data.n_samples, "n_features": data.n_features},
        "wall_time_seconds": round(time.time() - started, 3),
    }
    (out / "run_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    log.info("wrote %s", out)
    return 0


def cmd_synth(args) -> int:
    try:
        spec = SyntheticSpec(args.samples, args.features, args.informative, args.effect, args.balance, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    m, planted = generate_synthetic(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(m, out)
    (out.parent / "planted.txt").write_text("".join(f"{p}\n" for p in planted), encoding="utf-8")
    return 0


def cmd_rank(args) -> int:
    """Exploratory ranking over the whole dataset; no held-out data, so no performance estimate."""
    roster = roster_by_label(args.n_bootstraps)
    if args.strategy not in roster:
        raise ConfigError(f"--strategy: unknown strategy {args.strategy!r}; known: {', '.join(roster)}")
    spec = roster[args.strategy]
    data = load_csv(args.data, args.label_column, args.id_column)
    th = min(args.threshold, data.n_features - 1)
    if th < 1:
        raise ConfigError("--threshold: dataset has too few features")
    output = run_strategy(data, spec, [th], seed=args.seed)
    ranking = output[th] if isinstance(output, dict) else output
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_ranking(out, ranking, data.feature_names)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybefs", description="Hybrid ensemble feature selection")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="cross-validated strategy comparison")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("synth", help="write a synthetic dataset with planted features")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--features", type=int, default=1000)
    s.add_argument("--informative", type=int, default=20)
    s.add_argument("--effect", type=float, default=2.0)
    s.add_argument("--balance", type=float, default=0.5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    k = sub.add_parser("rank", help="rank all features of a dataset with one strategy")
    k.add_argument("--data", required=True)
    k.add_argument("--strategy", required=True)
    k.add_argument("--out", required=True)
    k.add_argument("--label-column", default="class")
    k.add_argument("--id-column")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--n-bootstraps", type=int, default=50)
    k.add_argument("--threshold", type=int, default=50, help="threshold for stability-weighted strategies")
    k.set_defaults(func=cmd_rank)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, StrategyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
