"""Command-line front end: generate, train, eval, baseline, sweep, import.

All numeric output goes to stdout as canonical JSON or CSV; progress and
timing go to stderr.  For a fixed argv, fixed input files, and fixed seed
the stdout bytes are identical across runs.  Exit codes: 0 success, 2 usage
error, 3 validation error, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io as pio
from .errors import PeergradeError, ValidationError
from .graph import Split, propagation_matrix
from .harness import (
    METHOD_AVERAGE,
    METHOD_MEDIAN,
    monte_carlo_splits,
    rmse,
    run_experiment,
    run_sweep,
)
from .model import initial_features, load_model, predict, save_model, train
from .synthetic import build_scenario

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _emit(text: str) -> None:
    sys.stdout.write(text)


def _parse_scale(text: str) -> float:
    if not text.startswith("max="):
        raise ValidationError(f"--scale expects max=<value>, got {text!r}")
    try:
        value = float(text[4:])
    except ValueError:
        raise ValidationError(f"--scale expects a numeric maximum, got {text!r}") from None
    if value <= 0:
        raise ValidationError(f"--scale maximum must be positive, got {value}")
    return value


def _default_jobs() -> int:
    env = os.environ.get("PEERGRADE_JOBS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _cmd_generate(args) -> int:
    cfg = pio.load_scenario_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    started = time.perf_counter()
    dataset = build_scenario(cfg)
    pio.save_dataset(dataset, args.out)
    _log(f"generated bundle in {time.perf_counter() - started:.2f}s")
    _emit(pio.canonical_json({
        "n": dataset.graph.n,
        "m": dataset.graph.m,
        "seed": cfg.seed,
        "assessments": int(dataset.graph.A.nnz),
        "ownership": int(dataset.graph.O.nnz),
        "social_edges": int(dataset.graph.S.nnz // 2),
        "out": str(args.out),
    }))
    return EXIT_OK


def _cmd_train(args) -> int:
    dataset = pio.load_dataset(args.data)
    cfg = pio.load_train_config(args.train_config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    labeled = tuple(int(i) for i in np.nonzero(dataset.truth.mask)[0])
    if not labeled:
        raise ValidationError("dataset has no ground-truth labels to train on")
    dataset = replace(dataset, split=Split(train=labeled, test=()))
    started = time.perf_counter()
    params, history = train(dataset, cfg)
    _log(f"trained {cfg.epochs} epochs in {time.perf_counter() - started:.2f}s")
    save_model(params, cfg, args.out)
    _emit(pio.canonical_json({
        "epochs": cfg.epochs,
        "seed": cfg.seed,
        "train_items": len(labeled),
        "final_train_loss": history[-1],
        "model": str(args.out),
    }))
    return EXIT_OK


def _cmd_eval(args) -> int:
    dataset = pio.load_dataset(args.data)
    params, cfg = load_model(args.model)
    split_cfg = pio.load_split_config(args.split)
    splits = monte_carlo_splits(dataset.graph.m, split_cfg)
    prop = propagation_matrix(dataset.graph)
    h0 = initial_features(cfg.features, prop)
    scores = []
    for split in splits:
        preds = predict(params, prop, h0, split.test)
        scores.append(rmse(preds, dataset.truth, split.test))
    _emit(pio.canonical_json({
        "method": "gcn-soan",
        "model": str(args.model),
        "split": {"train_fraction": split_cfg.train_fraction,
                  "n_splits": split_cfg.n_splits, "seed": split_cfg.seed},
        "per_split": scores,
        "mean": float(np.mean(scores)),
        "std": float(np.std(scores, ddof=1)) if len(scores) > 1 else 0.0,
    }))
    return EXIT_OK


def _cmd_baseline(args) -> int:
    dataset = pio.load_dataset(args.data)
    split_cfg = pio.load_split_config(args.split)
    report = run_experiment(dataset, [args.method], split_cfg, train_cfg=None)
    _log(f"scored {args.method} in {report.wall_clock_seconds:.2f}s")
    _emit(report.canonical_json(include_timing=False))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec, methods, split_cfg, train_cfg = pio.load_sweep_document(args.spec)
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    started = time.perf_counter()
    result = run_sweep(spec, methods, split_cfg, train_cfg, jobs=jobs)
    _log(f"swept {len(spec.grid)} points in {time.perf_counter() - started:.2f}s")
    for point in result.points:
        if point.error is not None:
            _log(f"point {point.value!r} failed: {point.error}")
    csv_text = result.to_csv()
    Path(args.out).write_text(csv_text, encoding="utf-8")
    _emit(csv_text)
    return EXIT_OK


def _cmd_import(args) -> int:
    scale = _parse_scale(args.scale) if args.scale is not None else None
    dataset = pio.load_dataset(getattr(args, "from"), scale_max=scale)
    pio.save_dataset(dataset, args.out)
    _emit(pio.canonical_json({
        "n": dataset.graph.n,
        "m": dataset.graph.m,
        "assessments": int(dataset.graph.A.nnz),
        "truth_items": int(dataset.truth.mask.sum()),
        "out": str(args.out),
    }))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peergrade",
        description="Peer-assessment aggregation: synthetic data, training, evaluation, sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic dataset bundle")
    p.add_argument("--config", required=True, help="scenario config JSON")
    p.add_argument("--out", required=True, help="output bundle directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("train", help="train the model on every labeled item")
    p.add_argument("--data", required=True, help="dataset bundle directory")
    p.add_argument("--train-config", required=True, help="train config JSON")
    p.add_argument("--out", required=True, help="model checkpoint path")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="score a saved model over Monte Carlo test splits")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--split", required=True, help="split config JSON")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("baseline", help="score the average or median baseline")
    p.add_argument("--method", required=True, choices=[METHOD_AVERAGE, METHOD_MEDIAN])
    p.add_argument("--data", required=True)
    p.add_argument("--split", required=True, help="split config JSON")
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("sweep", help="run a parameter sweep and emit CSV")
    p.add_argument("--spec", required=True, help="sweep spec JSON")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--jobs", type=int, default=None,
                   help="parallel workers (default: $PEERGRADE_JOBS or 1)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("import", help="import external CSVs into a bundle")
    p.add_argument("--from", required=True, help="directory of source CSVs")
    p.add_argument("--scale", default=None, help="max=<v>: divide grades and truths by v")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_import)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:  # argparse already printed usage to stderr
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except ValidationError as exc:
        _log(f"error: {exc}")
        return EXIT_VALIDATION
    except PeergradeError as exc:
        _log(f"error: {exc}")
        return EXIT_RUNTIME
    except OSError as exc:
        _log(f"error: {exc}")
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
