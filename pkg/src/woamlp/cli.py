"""Command-line driver: fuse feature tables, train the classifier,
evaluate a trained model, and benchmark the optimizer on test functions.

Every training or benchmark run writes the fully resolved run config next
to its outputs, so the run can be repeated bit-identically by pointing
--config at that echo. Exit codes: 0 success, 1 usage, 2 I/O, 3 invalid
data or config, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import woa
from .benchmarks import BENCHMARKS
from .errors import DataError, NumericError
from .feature_io import (
    load_feature_table,
    save_feature_table,
    fuse,
    split,
)
from .figures import save_confusion_matrix_plot, save_convergence_plot
from .metrics import confusion, metrics_report
from .nn_core import MlpTopology
from .trainer import TrainConfig, load_model, predict_many, save_model, train

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

TRAIN_DEFAULTS = {
    "hidden_layers": [10],
    "hidden_activation": "sigmoid",
    "population_size": 30,
    "max_iterations": 200,
    "spiral_shape": 1.0,
    "weight_bound": 10.0,
    "normalize": True,
    "test_fraction": 0.25,
    "seed": 0,
}

BENCH_DEFAULTS = {
    "objective": "sphere",
    "dimension": 10,
    "population_size": 30,
    "max_iterations": 200,
    "lower_bound": -10.0,
    "upper_bound": 10.0,
    "spiral_shape": 1.0,
    "seed": 0,
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the documented code is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_hidden_layers(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise DataError(f"hidden layers must be comma-separated integers, got {text!r}")
    if not sizes or any(size < 1 for size in sizes):
        raise DataError(f"hidden layer sizes must be positive integers, got {text!r}")
    return sizes


def _load_config_file(path: str, defaults: dict) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            values = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"malformed config file {path}: {exc}") from exc
    if not isinstance(values, dict):
        raise DataError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(values) - set(defaults))
    if unknown:
        raise DataError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return values


def _resolve(defaults: dict, args, keys) -> dict:
    """Precedence: flags > config file > built-in defaults."""
    resolved = dict(defaults)
    if getattr(args, "config", None):
        resolved.update(_load_config_file(args.config, defaults))
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _validate_train_config(config: dict) -> dict:
    if isinstance(config["hidden_layers"], str):
        config["hidden_layers"] = _parse_hidden_layers(config["hidden_layers"])
    layers = config["hidden_layers"]
    if (
        not isinstance(layers, list)
        or not layers
        or any(not isinstance(size, int) or size < 1 for size in layers)
    ):
        raise DataError("hidden_layers must be a non-empty list of positive integers")
    for key in ("population_size", "max_iterations", "seed"):
        if not isinstance(config[key], int):
            raise DataError(f"{key} must be an integer")
    for key in ("spiral_shape", "weight_bound", "test_fraction"):
        config[key] = float(config[key])
    if not isinstance(config["normalize"], bool):
        raise DataError("normalize must be true or false")
    if not 0 <= config["test_fraction"] < 1:
        raise DataError("test_fraction must be in [0, 1)")
    return config


def _stem(path: str) -> str:
    return os.path.splitext(path)[0]


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _accuracy(model, table) -> float:
    labels, _ = predict_many(model, table.features)
    hits = sum(1 for got, want in zip(labels, table.labels) if got == want)
    return hits / table.n_samples


def cmd_fuse(args) -> int:
    table_a = load_feature_table(args.table_a)
    table_b = load_feature_table(args.table_b)
    fused = fuse(table_a, table_b)
    save_feature_table(fused, args.output)
    print(
        f"fused {fused.n_samples} samples: {table_a.n_features} + "
        f"{table_b.n_features} -> {fused.n_features} features ({args.output})"
    )
    return EXIT_OK


def cmd_train(args) -> int:
    config = _resolve(TRAIN_DEFAULTS, args, TRAIN_DEFAULTS.keys())
    config = _validate_train_config(config)
    table = load_feature_table(args.data)

    stem = _stem(args.output)
    holdout = None
    if config["test_fraction"] > 0:
        table, holdout = split(table, config["test_fraction"], config["seed"])
        save_feature_table(holdout, f"{stem}_holdout.csv")

    topology = MlpTopology(
        layer_sizes=(table.n_features, *config["hidden_layers"], len(table.class_names)),
        hidden_activation=config["hidden_activation"],
    )
    train_config = TrainConfig.create(
        topology,
        population_size=config["population_size"],
        max_iterations=config["max_iterations"],
        weight_bound=config["weight_bound"],
        spiral_shape=config["spiral_shape"],
        seed=config["seed"],
        normalize=config["normalize"],
    )
    model = train(train_config, table, workers=args.workers)

    save_model(model, args.output)
    woa.save_history(model.training_history, f"{stem}_history.csv")
    _write_json(config, f"{stem}_config.json")
    if not args.no_figures:
        save_convergence_plot(model.training_history, f"{stem}_history.png")

    print(f"trained on {table.n_samples} samples"
          + (f", held out {holdout.n_samples}" if holdout is not None else ""))
    print(f"final fitness: {model.training_history[-1]:.6f}")
    print(f"training accuracy: {_accuracy(model, table):.4f}")
    if holdout is not None:
        print(f"holdout accuracy: {_accuracy(model, holdout):.4f}")
    print(f"wrote {args.output}, {stem}_history.csv, {stem}_config.json")
    return EXIT_OK


def cmd_eval(args) -> int:
    model = load_model(args.model)
    table = load_feature_table(args.data)
    positive = args.positive_class or model.class_names[0]
    if positive not in model.class_names:
        raise DataError(
            f"positive class {positive!r} is not among the model's classes "
            f"{model.class_names}"
        )

    labels, _ = predict_many(model, table.features)
    cm = confusion(labels, table.labels, positive)
    report = metrics_report(cm)

    _write_json(report.to_dict(), args.output)
    stem = _stem(args.output)
    text = report.to_text()
    with open(f"{stem}.txt", "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    if not args.no_figures:
        save_confusion_matrix_plot(cm, f"{stem}.png")
    print(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _resolve(BENCH_DEFAULTS, args, BENCH_DEFAULTS.keys())
    if config["objective"] not in BENCHMARKS:
        raise DataError(
            f"unknown objective {config['objective']!r}; choose from "
            f"{', '.join(sorted(BENCHMARKS))}"
        )
    for key in ("dimension", "population_size", "max_iterations", "seed"):
        if not isinstance(config[key], int):
            raise DataError(f"{key} must be an integer")
    for key in ("lower_bound", "upper_bound", "spiral_shape"):
        config[key] = float(config[key])

    woa_config = woa.WoaConfig(
        population_size=config["population_size"],
        max_iterations=config["max_iterations"],
        dimension=config["dimension"],
        lower_bound=config["lower_bound"],
        upper_bound=config["upper_bound"],
        spiral_shape=config["spiral_shape"],
        seed=config["seed"],
    )
    state = woa.optimize(BENCHMARKS[config["objective"]], woa_config, workers=args.workers)

    woa.save_history(state.history, args.output)
    stem = _stem(args.output)
    _write_json(config, f"{stem}_config.json")
    if not args.no_figures:
        save_convergence_plot(
            state.history,
            f"{stem}.png",
            title=f"{config['objective']} (d={config['dimension']})",
        )
    print(f"{config['objective']}: best fitness {state.best_fitness!r} "
          f"after {config['max_iterations']} iterations")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="woamlp",
        description="Whale-optimized MLP classifier: fuse, train, eval, bench.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    p_fuse = commands.add_parser(
        "fuse", help="concatenate two feature tables sharing the same samples"
    )
    p_fuse.add_argument("table_a", help="first feature table CSV")
    p_fuse.add_argument("table_b", help="second feature table CSV")
    p_fuse.add_argument("-o", "--output", required=True, help="fused CSV path")
    p_fuse.set_defaults(func=cmd_fuse)

    p_train = commands.add_parser(
        "train", help="split the data, fit the classifier, write model and history"
    )
    p_train.add_argument("--data", required=True, help="feature table CSV")
    p_train.add_argument("-o", "--output", required=True, help="model JSON path")
    p_train.add_argument("--config", help="JSON file with run parameters")
    p_train.add_argument(
        "--hidden-layers", dest="hidden_layers",
        help="comma-separated hidden layer sizes, e.g. 8,4",
    )
    p_train.add_argument(
        "--hidden-activation", dest="hidden_activation",
        choices=("sigmoid", "tanh", "relu"),
    )
    p_train.add_argument("--population-size", dest="population_size", type=int)
    p_train.add_argument("--max-iterations", dest="max_iterations", type=int)
    p_train.add_argument("--spiral-shape", dest="spiral_shape", type=float)
    p_train.add_argument("--weight-bound", dest="weight_bound", type=float)
    p_train.add_argument(
        "--normalize", dest="normalize", action=argparse.BooleanOptionalAction,
        default=None, help="z-score features before training",
    )
    p_train.add_argument(
        "--test-fraction", dest="test_fraction", type=float,
        help="held-out fraction per class; 0 trains on everything",
    )
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--workers", type=int, default=1,
                         help="parallel fitness evaluations (never changes results)")
    p_train.add_argument("--no-figures", action="store_true",
                         help="skip rendering the convergence plot")
    p_train.set_defaults(func=cmd_train)

    p_eval = commands.add_parser(
        "eval", help="score a trained model on a labeled table"
    )
    p_eval.add_argument("--model", required=True, help="model JSON from train")
    p_eval.add_argument("--data", required=True, help="feature table CSV")
    p_eval.add_argument("-o", "--output", default="metrics.json",
                        help="metrics JSON path (default metrics.json)")
    p_eval.add_argument("--positive-class", dest="positive_class",
                        help="class treated as positive (default: model's first)")
    p_eval.add_argument("--no-figures", action="store_true",
                        help="skip rendering the confusion matrix plot")
    p_eval.set_defaults(func=cmd_eval)

    p_bench = commands.add_parser(
        "bench", help="run the optimizer on a standard test function"
    )
    p_bench.add_argument("--objective", choices=sorted(BENCHMARKS))
    p_bench.add_argument("--dim", dest="dimension", type=int)
    p_bench.add_argument("--population-size", dest="population_size", type=int)
    p_bench.add_argument("--max-iterations", dest="max_iterations", type=int)
    p_bench.add_argument("--lower", dest="lower_bound", type=float)
    p_bench.add_argument("--upper", dest="upper_bound", type=float)
    p_bench.add_argument("--spiral-shape", dest="spiral_shape", type=float)
    p_bench.add_argument("--seed", type=int)
    p_bench.add_argument("--config", help="JSON file with run parameters")
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("-o", "--output", default="bench_history.csv",
                         help="history CSV path (default bench_history.csv)")
    p_bench.add_argument("--no-figures", action="store_true")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
