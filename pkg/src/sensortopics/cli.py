"""Command-line interface.

Subcommands: train, apply, evaluate, sweep, ablate, stats. A flat JSON config
file supplies defaults; flags override. Exit codes: 0 success, 1 usage or
config error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, SensorTopicsError
from .pipeline import (
    Bundle,
    RunConfig,
    load_dataset,
    run_apply,
    run_train,
    write_run_outputs,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="output directory")
    p.add_argument("--data", help="UCI-HAR root dir or synthetic-config JSON")
    p.add_argument("-p", type=int, default=None, help="window size")
    p.add_argument("-v", type=int, default=None, help="characters per channel")
    p.add_argument("-k", type=int, default=None, help="topic count")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--iters", type=int, default=None, dest="iterations")
    p.add_argument("--burn-in", type=int, default=None, dest="burn_in")
    p.add_argument("--sample-lag", type=int, default=None, dest="sample_lag")
    p.add_argument("--fold-iters", type=int, default=None, dest="fold_iterations")
    p.add_argument("--mapping", choices=["greedy", "optimal"], default=None)
    p.add_argument("--fit-priors", action="store_const", const=True, default=None)
    p.add_argument("--show-config", action="store_true",
                   help="print the resolved config and exit")


_CONFIG_KEYS = (
    "data", "p", "v", "k", "alpha", "beta", "iterations", "burn_in",
    "sample_lag", "fold_iterations", "seed", "mapping", "fit_priors",
    "kmeans_restarts", "remove_top",
)


def _config_from_args(args) -> RunConfig:
    overrides = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
    if args.config:
        cfg = RunConfig.from_file(args.config, overrides)
    else:
        cfg = RunConfig.resolve({}, overrides)
    if args.show_config:
        print(json.dumps(cfg.to_dict(), indent=2))
        raise SystemExit(0)
    if not cfg.data:
        raise ConfigError("no data source given (--data or config 'data')")
    return cfg


def _cmd_train(args) -> int:
    cfg = _config_from_args(args)
    out = Path(args.out or "out")
    dataset = load_dataset(cfg.data, "train")
    result = run_train(dataset, cfg)
    result.bundle.save(out)
    write_run_outputs(out, cfg, result.theta, result.report,
                      labels=result.corpus.labels())
    if result.report is not None:
        print(f"train macro F1: {result.report.macro_f1:.4f}")
    return 0


def _cmd_apply(args) -> int:
    bundle = Bundle.load(args.bundle)
    dataset = load_dataset(args.data or bundle.config.data, args.split)
    result = run_apply(bundle, dataset, seed=args.seed, remap=args.remap_on_test)
    out = Path(args.out or "out")
    write_run_outputs(out, bundle.config, result.theta, result.report,
                      labels=result.corpus.labels())
    if result.report is not None:
        print(f"{args.split} macro F1: {result.report.macro_f1:.4f}")
    return 0


def _cmd_evaluate(args) -> int:
    from .evaluate import assign_classes, compute_report

    bundle = Bundle.load(args.bundle)
    rows = list(csv.DictReader(open(args.theta)))
    if not rows:
        raise DataError(f"{args.theta}: empty theta table")
    k_cols = [c for c in rows[0] if c.startswith("theta_")]
    if any(r["true_label"] == "" for r in rows):
        raise DataError(f"{args.theta}: no labels stored; cannot evaluate")
    theta = np.asarray([[float(r[c]) for c in k_cols] for r in rows])
    labels = np.asarray([int(r["true_label"]) for r in rows])
    topics = assign_classes(theta)
    report = compute_report(topics, labels, bundle.mapping,
                            class_names=bundle.label_names)
    out = Path(args.out or "out")
    write_run_outputs(out, bundle.config, theta, report, labels=labels)
    print(f"macro F1: {report.macro_f1:.4f}")
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def _cell_f1s(cfg: RunConfig) -> tuple[float, float]:
    train_ds = load_dataset(cfg.data, "train")
    result = run_train(train_ds, cfg)
    test_ds = load_dataset(cfg.data, "test")
    applied = run_apply(result.bundle, test_ds)
    train_f1 = result.report.macro_f1 if result.report else float("nan")
    test_f1 = applied.report.macro_f1 if applied.report else float("nan")
    return train_f1, test_f1


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    p_values = _int_list(args.p_values)
    v_values = _int_list(args.v_values)
    seeds = _int_list(args.seeds) if args.seeds else [cfg.seed]
    if not p_values or not v_values:
        raise ConfigError("sweep needs non-empty --p-values and --v-values")
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "sweep.csv"
    done = set()
    if csv_path.is_file():
        for row in csv.DictReader(open(csv_path)):
            done.add((int(row["p"]), int(row["v"]), int(row["seed"])))
    new_file = not csv_path.is_file()
    with open(csv_path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(["p", "v", "seed", "train_f1", "test_f1", "error"])
        for p in p_values:
            for v in v_values:
                for seed in seeds:
                    if (p, v, seed) in done:
                        continue
                    cell = RunConfig.resolve(
                        cfg.to_dict(), {"p": p, "v": v, "seed": seed}
                    )
                    try:
                        train_f1, test_f1 = _cell_f1s(cell)
                        writer.writerow(
                            [p, v, seed, repr(train_f1), repr(test_f1), ""]
                        )
                    except SensorTopicsError as exc:
                        writer.writerow([p, v, seed, "", "", str(exc)])
                    fh.flush()
    print(f"sweep results in {csv_path}")
    return 0


def _cmd_ablate(args) -> int:
    from .codebook import KMeansConfig, WindowConfig, train_codebooks

    cfg = _config_from_args(args)
    n_values = _int_list(args.n_values)
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    train_ds = load_dataset(cfg.data, "train")
    test_ds = load_dataset(cfg.data, "test")
    codebooks = train_codebooks(
        train_ds,
        WindowConfig(p=cfg.p),
        cfg.v,
        KMeansConfig(restarts=cfg.kmeans_restarts),
        seed=cfg.seed,
    )
    csv_path = out / "ablate.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_removed", "train_f1", "test_f1"])
        for n in n_values:
            cell = RunConfig.resolve(cfg.to_dict(), {"remove_top": n})
            result = run_train(train_ds, cell, codebooks=codebooks)
            applied = run_apply(result.bundle, test_ds)
            writer.writerow([
                n,
                repr(result.report.macro_f1 if result.report else float("nan")),
                repr(applied.report.macro_f1 if applied.report else float("nan")),
            ])
    print(f"ablation results in {csv_path}")
    return 0


def _cmd_stats(args) -> int:
    from .codebook import KMeansConfig, WindowConfig, train_codebooks
    from .evaluate import corpus_statistics
    from .words import build_corpus

    cfg = _config_from_args(args)
    dataset = load_dataset(cfg.data, args.split)
    codebooks = train_codebooks(
        dataset,
        WindowConfig(p=cfg.p),
        cfg.v,
        KMeansConfig(restarts=cfg.kmeans_restarts),
        seed=cfg.seed,
    )
    corpus = build_corpus(dataset, codebooks)
    k = cfg.k or (dataset.n_classes() if dataset.labels is not None else 0)
    stats = corpus_statistics(corpus, k)
    print(json.dumps(
        {"D": stats.D, "N": stats.N, "B": stats.B, "V": stats.V, "K": stats.K}
    ))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sensortopics",
                     description="Latent activity discovery in sensor streams")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train codebooks + topic model")
    _add_common(p_train)
    p_train.set_defaults(func=_cmd_train)

    p_apply = sub.add_parser("apply", help="fold unseen data into a bundle")
    p_apply.add_argument("--bundle", required=True)
    p_apply.add_argument("--data")
    p_apply.add_argument("--split", default="test", choices=["train", "test"])
    p_apply.add_argument("--seed", type=int, default=None)
    p_apply.add_argument("--out")
    p_apply.add_argument("--remap-on-test", action="store_true",
                         help="recompute the topic->class mapping on this data")
    p_apply.set_defaults(func=_cmd_apply)

    p_eval = sub.add_parser("evaluate", help="report from a stored theta table")
    p_eval.add_argument("--bundle", required=True)
    p_eval.add_argument("--theta", required=True)
    p_eval.add_argument("--out")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="grid over p and v")
    _add_common(p_sweep)
    p_sweep.add_argument("--p-values", required=True)
    p_sweep.add_argument("--v-values", required=True)
    p_sweep.add_argument("--seeds", help="comma-separated run seeds")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_ablate = sub.add_parser("ablate", help="remove most frequent words")
    _add_common(p_ablate)
    p_ablate.add_argument("--n-values", required=True)
    p_ablate.set_defaults(func=_cmd_ablate)

    p_stats = sub.add_parser("stats", help="corpus statistics")
    _add_common(p_stats)
    p_stats.add_argument("--split", default="train", choices=["train", "test"])
    p_stats.set_defaults(func=_cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001 - invariant violations exit 3
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
