"""Command-line harness.

Subcommands: ``sinc`` (grid-trained regression comparison), ``bench``
(repeated random-split trials on a CSV dataset), ``sweep`` (node-count
sweep), ``train`` (fit one model and save it), ``predict`` (apply a
saved model to new inputs).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
failure (including every trial of a benchmark failing numerically).
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .bench import (ExperimentConfig, report_all_failed, run_dataset,
                    run_node_sweep, run_sinc)
from .datasets import CLASSIFICATION, REGRESSION, CsvSchema, load_csv
from .errors import (FormatError, NumericalFailure, NumericOverflowError,
                     PreconditionError, RankDeficientError, ShapeError)
from .models import load_model, predict, save_model, train_eelm, train_elm

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_TASKS = {"reg": REGRESSION, "cls": CLASSIFICATION}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--algo", choices=("elm", "eelm", "both"),
                        default="both", help="which algorithm(s) to run")
    parser.add_argument("--trials", type=int, default=1,
                        help="number of seeded trials")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")
    parser.add_argument("--anchor-strategy",
                        choices=("first", "random", "even"), default="random",
                        help="how the constructive algorithm picks anchors")
    parser.add_argument("--out", metavar="PATH",
                        help="write the JSON report here")
    parser.add_argument("--plot-data", metavar="PATH",
                        help="write plot-ready CSV data here")


def _add_csv_source(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--csv", metavar="PATH", required=required,
                        help="dataset CSV (header row required)")
    parser.add_argument("--target", metavar="COL", action="append",
                        help="target column name (repeatable for "
                             "multi-output regression)")
    parser.add_argument("--task", choices=("reg", "cls"), default="reg",
                        help="regression or classification")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eelm",
        description="Train and benchmark single-hidden-layer networks with "
                    "random (elm) or constructive (eelm) hidden layers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sinc", help="sin(x)/x benchmark on [-10,10] with "
                                    "test points on [-30,30]")
    p.add_argument("--nodes", type=int, default=200)
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-test", type=int, default=200)
    p.add_argument("--noise", type=float, default=0.0, metavar="SIGMA",
                   help="training-target noise standard deviation")
    p.add_argument("--test-dist", choices=("uniform", "normal"),
                   default="uniform")
    _add_common(p)
    p.set_defaults(func=_cmd_sinc, trials=50)

    p = sub.add_parser("bench", help="repeated random-split trials on a CSV")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--split", type=float, default=0.75, metavar="F",
                   help="training fraction of each split")
    _add_csv_source(p, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("sweep", help="repeat a benchmark for several node "
                                     "counts")
    p.add_argument("--nodes-sweep", required=True, metavar="A,B,C",
                   help="comma-separated node counts")
    p.add_argument("--split", type=float, default=0.75, metavar="F")
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-test", type=int, default=200)
    p.add_argument("--noise", type=float, default=0.0, metavar="SIGMA")
    p.add_argument("--test-dist", choices=("uniform", "normal"),
                   default="uniform")
    _add_csv_source(p, required=False)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("train", help="train one model on a CSV and save it")
    p.add_argument("--nodes", type=int, required=True)
    _add_csv_source(p, required=True)
    p.add_argument("--algo", choices=("elm", "eelm"), default="eelm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--anchor-strategy",
                   choices=("first", "random", "even"), default="random")
    p.add_argument("--model-out", required=True, metavar="PATH")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="apply a saved model to a feature CSV")
    p.add_argument("--model", required=True, metavar="PATH")
    p.add_argument("--csv", required=True, metavar="PATH",
                   help="feature columns only, header row required")
    p.add_argument("--out", required=True, metavar="PATH",
                   help="output CSV of predictions")
    p.set_defaults(func=_cmd_predict)
    return parser


def _algorithms(args) -> tuple[str, ...]:
    return ("elm", "eelm") if args.algo == "both" else (args.algo,)


def _schema(args) -> CsvSchema:
    if not args.target:
        raise PreconditionError("--target is required with --csv")
    target = args.target[0] if len(args.target) == 1 else tuple(args.target)
    return CsvSchema(target=target, task=_TASKS[args.task])


def _print_summary(report: dict) -> None:
    metric = report["metric"]
    if report["experiment"] == "sweep":
        for entry in report["sweep"]:
            for algo, section in entry["algorithms"].items():
                agg = section["aggregates"]["test_metric"]
                shown = "all trials failed" if agg is None else \
                    f"test {metric} mean {agg['mean']:.6g}"
                print(f"nodes={entry['nodes']:>4} {algo:>4}: {shown} "
                      f"({section['failures']} failures)")
        return
    for algo, section in report["algorithms"].items():
        agg = section["aggregates"]
        if agg["test_metric"] is None:
            print(f"{algo:>4}: all {len(section['trials'])} trials failed")
            continue
        print(f"{algo:>4}: train {metric} {agg['train_metric']['mean']:.6g}, "
              f"test {metric} {agg['test_metric']['mean']:.6g}, "
              f"train {agg['train_seconds']['mean']:.4g}s over "
              f"{len(section['trials'])} trial(s), "
              f"{section['failures']} failure(s)")


def _finish_bench(report: dict) -> int:
    _print_summary(report)
    if report_all_failed(report):
        print("error: every trial failed numerically", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_sinc(args) -> int:
    config = ExperimentConfig(
        algorithms=_algorithms(args), nodes=args.nodes, trials=args.trials,
        seed=args.seed, anchor_strategy=args.anchor_strategy,
        n_train=args.n_train, n_test=args.n_test, noise_sigma=args.noise,
        test_distribution=args.test_dist, out_path=args.out,
        plot_path=args.plot_data)
    return _finish_bench(run_sinc(config))


def _cmd_bench(args) -> int:
    config = ExperimentConfig(
        algorithms=_algorithms(args), nodes=args.nodes, trials=args.trials,
        seed=args.seed, split_fraction=args.split,
        anchor_strategy=args.anchor_strategy, csv_path=args.csv,
        csv_schema=_schema(args), out_path=args.out,
        plot_path=args.plot_data)
    return _finish_bench(run_dataset(config))


def _cmd_sweep(args) -> int:
    try:
        sweep = tuple(int(tok) for tok in args.nodes_sweep.split(",") if tok)
    except ValueError:
        raise PreconditionError(
            f"--nodes-sweep must be comma-separated integers, got "
            f"{args.nodes_sweep!r}") from None
    config = ExperimentConfig(
        algorithms=_algorithms(args), node_sweep=sweep, trials=args.trials,
        seed=args.seed, split_fraction=args.split,
        anchor_strategy=args.anchor_strategy,
        n_train=args.n_train, n_test=args.n_test, noise_sigma=args.noise,
        test_distribution=args.test_dist,
        csv_path=args.csv, csv_schema=_schema(args) if args.csv else None,
        out_path=args.out, plot_path=args.plot_data)
    return _finish_bench(run_node_sweep(config))


def _cmd_train(args) -> int:
    data = load_csv(args.csv, _schema(args))
    if args.algo == "elm":
        model, report = train_elm(data, args.nodes, seed=args.seed)
    else:
        model, report = train_eelm(data, args.nodes,
                                   anchor_strategy=args.anchor_strategy,
                                   seed=args.seed)
    save_model(model, args.model_out)
    metric = "accuracy" if data.task == CLASSIFICATION else "rmse"
    print(f"{args.algo}: trained {model.n_hidden} nodes on "
          f"{data.n_samples} samples in {report.train_seconds:.4g}s, "
          f"train {metric} {report.train_metric:.6g}; model -> "
          f"{args.model_out}")
    return EXIT_OK


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    try:
        with open(args.csv, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise FormatError("empty file, header row required",
                                  path=args.csv)
            rows = list(reader)
    except OSError as exc:
        raise FormatError(f"cannot read CSV: {exc}", path=args.csv) from exc
    if not rows:
        raise FormatError("no data rows", path=args.csv)
    features = np.empty((len(rows), len(header)))
    for i, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise FormatError(f"row has {len(row)} cells, header has "
                              f"{len(header)}", path=args.csv, line=i)
        for j, cell in enumerate(row):
            try:
                features[i - 1, j] = float(cell)
            except ValueError:
                raise FormatError(f"cell {cell!r} is not numeric",
                                  path=args.csv, line=i,
                                  column=j + 1) from None
    scores = predict(model, features)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"pred_{k + 1}" for k in range(scores.shape[1])])
        for row in scores:
            writer.writerow([repr(float(v)) for v in row])
    print(f"wrote {scores.shape[0]} predictions to {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ShapeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except PreconditionError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericOverflowError, RankDeficientError, NumericalFailure) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
