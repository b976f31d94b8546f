"""Benchmark harness: sinc comparison, dataset trials, node sweeps.

Each runner returns (and optionally writes) a JSON-ready report dict
with a versioned schema: per-trial records, aggregates recomputable
from them, and an environment note. Timing uses a monotonic clock and
never wraps file IO; the selection phase of the constructive algorithm
is reported separately from total training time so its cost scaling can
be regressed against ``n_hidden * n_features``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import platform
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .datasets import CLASSIFICATION, CsvSchema, Dataset, classification_rate, \
    gen_sinc, load_csv, rmse, split
from .errors import (FormatError, NumericalFailure, NumericOverflowError,
                     PreconditionError, RankDeficientError)
from .models import predict, train_eelm, train_elm

__all__ = ["REPORT_SCHEMA", "ExperimentConfig", "run_sinc", "run_dataset",
           "run_node_sweep", "validate_report", "report_all_failed"]

REPORT_SCHEMA = "slfn-bench-report/1"

ALGORITHMS = ("elm", "eelm")

# failures of a single trial are recorded, not fatal to the run
_TRIAL_ERRORS = (NumericOverflowError, RankDeficientError, NumericalFailure,
                 PreconditionError)

_RECORD_KEYS = ("trial", "seed", "train_seconds", "select_seconds",
                "test_seconds", "train_metric", "test_metric", "error")

_AGG_KEYS = ("train_metric", "test_metric", "train_seconds",
             "select_seconds", "test_seconds")


@dataclass
class ExperimentConfig:
    """Knobs shared by the three experiment runners."""

    algorithms: tuple[str, ...] = ("elm", "eelm")
    nodes: int | None = None
    node_sweep: tuple[int, ...] | None = None
    trials: int = 1
    seed: int = 0
    split_fraction: float = 0.75
    anchor_strategy: str = "random"
    # sinc source
    n_train: int = 200
    n_test: int = 200
    noise_sigma: float = 0.0
    test_distribution: str = "uniform"
    # csv source
    csv_path: str | None = None
    csv_schema: CsvSchema | None = None
    # outputs
    out_path: str | None = None
    plot_path: str | None = None

    def validate(self) -> None:
        if self.trials < 1:
            raise PreconditionError(f"trials must be >= 1, got {self.trials}")
        if not self.algorithms:
            raise PreconditionError("at least one algorithm is required")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise PreconditionError(f"unknown algorithm {algo!r}")
        if self.nodes is not None and self.nodes < 1:
            raise PreconditionError(f"nodes must be >= 1, got {self.nodes}")
        if self.node_sweep is not None:
            if not self.node_sweep:
                raise PreconditionError("node sweep list is empty")
            if any(n < 1 for n in self.node_sweep):
                raise PreconditionError("node counts must be >= 1")
        if not 0.0 < self.split_fraction < 1.0:
            raise PreconditionError(
                f"split fraction must be in (0, 1), got {self.split_fraction}")


def _environment() -> dict:
    return {
        "host": platform.node(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "python": sys.version.split()[0],
        "numpy": np.__version__,
    }


def _metric_for(task: str):
    if task == CLASSIFICATION:
        return "accuracy", classification_rate
    return "rmse", rmse


def _run_trial(algo: str, train_ds: Dataset, test_ds: Dataset, nodes: int,
               trial: int, seed: int, config: ExperimentConfig, metric_fn):
    """One train+test run; numeric failures end up in the record."""
    record = dict.fromkeys(_RECORD_KEYS)
    record.update(trial=trial, seed=seed, error=None)
    model = None
    try:
        if algo == "elm":
            model, rep = train_elm(train_ds, nodes, seed=seed)
        else:
            model, rep = train_eelm(train_ds, nodes,
                                    anchor_strategy=config.anchor_strategy,
                                    seed=seed)
        t0 = time.perf_counter()
        scores = predict(model, test_ds.inputs)
        test_seconds = time.perf_counter() - t0
        record.update(train_seconds=rep.train_seconds,
                      select_seconds=rep.select_seconds,
                      test_seconds=test_seconds,
                      train_metric=rep.train_metric,
                      test_metric=metric_fn(scores, test_ds.targets))
    except _TRIAL_ERRORS as exc:
        record["error"] = f"{type(exc).__name__}: {exc}"
        model = None
    return record, model


def _aggregate(records: list[dict], metric_name: str) -> dict:
    good = [r for r in records if r["error"] is None]
    out: dict = {}
    for key in _AGG_KEYS:
        values = np.array([r[key] for r in good], dtype=np.float64)
        if values.size == 0:
            out[key] = None
            continue
        agg = {
            "mean": float(values.mean()),
            "std": float(values.std()),
            "min": float(values.min()),
            "max": float(values.max()),
        }
        if key.endswith("_metric"):
            agg["best"] = agg["max"] if metric_name == "accuracy" else agg["min"]
        out[key] = agg
    return out


def _algo_section(records: list[dict], metric_name: str) -> dict:
    return {
        "trials": records,
        "aggregates": _aggregate(records, metric_name),
        "failures": sum(1 for r in records if r["error"] is not None),
    }


def _config_dict(config: ExperimentConfig) -> dict:
    raw = dataclasses.asdict(config)
    raw["algorithms"] = list(config.algorithms)
    if config.node_sweep is not None:
        raw["node_sweep"] = list(config.node_sweep)
    return raw


def _base_report(experiment: str, config: ExperimentConfig,
                 metric_name: str) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "experiment": experiment,
        "environment": _environment(),
        "config": _config_dict(config),
        "metric": metric_name,
        "algorithms": {},
    }


def _finish(report: dict, config: ExperimentConfig) -> dict:
    validate_report(report)
    if config.out_path:
        with open(config.out_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return report


def run_sinc(config: ExperimentConfig) -> dict:
    """The sinc comparison: many seeded random-layer trials against one
    deterministic constructive run, plus an xy plot-data file."""
    config.validate()
    if config.nodes is None:
        raise PreconditionError("sinc experiment needs a node count")
    train_ds, test_ds = gen_sinc(config.n_train, config.n_test, config.seed,
                                 noise_sigma=config.noise_sigma,
                                 test_distribution=config.test_distribution)
    metric_name, metric_fn = _metric_for(train_ds.task)
    report = _base_report("sinc", config, metric_name)

    plot_models: dict[str, object] = {}
    for algo in config.algorithms:
        # the random algorithm averages over trials; the constructive
        # one is deterministic given the anchor seed, so it runs once
        n_runs = config.trials if algo == "elm" else 1
        records = []
        for i in range(n_runs):
            record, model = _run_trial(algo, train_ds, test_ds, config.nodes,
                                       i, config.seed + i, config, metric_fn)
            records.append(record)
            if model is not None and algo not in plot_models:
                plot_models[algo] = model
        report["algorithms"][algo] = _algo_section(records, metric_name)

    if config.plot_path:
        _write_sinc_plot(config.plot_path, train_ds, test_ds, plot_models)
    return _finish(report, config)


def _write_sinc_plot(path, train_ds: Dataset, test_ds: Dataset,
                     models: dict) -> None:
    xs = np.concatenate([train_ds.inputs[:, 0], test_ds.inputs[:, 0]])
    ys = np.concatenate([train_ds.targets[:, 0], test_ds.targets[:, 0]])
    columns = {"x": xs, "target": ys}
    for algo in ALGORITHMS:
        if algo in models:
            pred = np.concatenate([
                predict(models[algo], train_ds.inputs)[:, 0],
                predict(models[algo], test_ds.inputs)[:, 0],
            ])
        else:
            pred = np.full(xs.size, np.nan)
        columns[f"{algo}_pred"] = pred
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns.keys())
        for i in range(xs.size):
            writer.writerow([repr(float(col[i])) for col in columns.values()])


def _load_config_csv(config: ExperimentConfig) -> Dataset:
    if config.csv_path is None or config.csv_schema is None:
        raise PreconditionError("experiment needs csv_path and csv_schema")
    return load_csv(config.csv_path, config.csv_schema)


def run_dataset(config: ExperimentConfig) -> dict:
    """Repeated random-split trials of both algorithms on one dataset."""
    config.validate()
    if config.nodes is None:
        raise PreconditionError("dataset experiment needs a node count")
    data = _load_config_csv(config)
    metric_name, metric_fn = _metric_for(data.task)
    if config.nodes > math.ceil(config.split_fraction * data.n_samples):
        raise PreconditionError(
            f"nodes={config.nodes} exceeds the training side of a "
            f"{config.split_fraction} split of {data.n_samples} samples")
    report = _base_report("dataset", config, metric_name)
    report["dataset"] = {"name": data.name, "n_samples": data.n_samples,
                         "n_features": data.n_features, "task": data.task}

    records_by_algo = {algo: [] for algo in config.algorithms}
    for i in range(config.trials):
        trial_seed = config.seed + i
        train_ds, test_ds = split(data, config.split_fraction, trial_seed)
        for algo in config.algorithms:
            record, _ = _run_trial(algo, train_ds, test_ds, config.nodes, i,
                                   trial_seed, config, metric_fn)
            records_by_algo[algo].append(record)
    for algo in config.algorithms:
        report["algorithms"][algo] = _algo_section(records_by_algo[algo],
                                                   metric_name)
    return _finish(report, config)


def run_node_sweep(config: ExperimentConfig) -> dict:
    """Re-run the dataset (or sinc) comparison for each node count."""
    config.validate()
    if not config.node_sweep:
        raise PreconditionError("sweep experiment needs a node_sweep list")
    use_csv = config.csv_path is not None
    data = _load_config_csv(config) if use_csv else None
    if use_csv:
        metric_name, metric_fn = _metric_for(data.task)
    else:
        metric_name, metric_fn = _metric_for("regression")
    report = _base_report("sweep", config, metric_name)
    del report["algorithms"]
    report["sweep"] = []

    for nodes in config.node_sweep:
        entry = {"nodes": nodes, "algorithms": {}}
        records_by_algo = {algo: [] for algo in config.algorithms}
        for i in range(config.trials):
            trial_seed = config.seed + i
            if use_csv:
                train_ds, test_ds = split(data, config.split_fraction,
                                          trial_seed)
            else:
                train_ds, test_ds = gen_sinc(
                    config.n_train, config.n_test, trial_seed,
                    noise_sigma=config.noise_sigma,
                    test_distribution=config.test_distribution)
            for algo in config.algorithms:
                record, _ = _run_trial(algo, train_ds, test_ds, nodes, i,
                                       trial_seed, config, metric_fn)
                records_by_algo[algo].append(record)
        for algo in config.algorithms:
            entry["algorithms"][algo] = _algo_section(records_by_algo[algo],
                                                      metric_name)
        report["sweep"].append(entry)

    if config.plot_path:
        _write_sweep_plot(config.plot_path, report, config)
    return _finish(report, config)


def _write_sweep_plot(path, report: dict, config: ExperimentConfig) -> None:
    header = ["algorithm", "nodes", "train_metric", "test_metric",
              "train_seconds", "test_seconds", "select_seconds"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for algo in config.algorithms:
            for entry in report["sweep"]:
                agg = entry["algorithms"][algo]["aggregates"]

                def mean_of(key):
                    return "" if agg[key] is None else repr(agg[key]["mean"])

                writer.writerow([algo, entry["nodes"],
                                 mean_of("train_metric"),
                                 mean_of("test_metric"),
                                 mean_of("train_seconds"),
                                 mean_of("test_seconds"),
                                 mean_of("select_seconds")])


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise FormatError(f"invalid report: {message}")


def _validate_section(section: dict, metric_name: str) -> None:
    _check(isinstance(section, dict), "algorithm section is not an object")
    _check(set(section) == {"trials", "aggregates", "failures"},
           f"algorithm section keys {sorted(section)}")
    for record in section["trials"]:
        _check(set(record) == set(_RECORD_KEYS),
               f"trial record keys {sorted(record)}")
        if record["error"] is None:
            _check(all(isinstance(record[k], (int, float))
                       for k in _AGG_KEYS),
                   "successful trial has non-numeric fields")
            _check(record["train_seconds"] >= 0.0, "negative train time")
    _check(section["failures"] == sum(1 for r in section["trials"]
                                      if r["error"] is not None),
           "failure count does not match records")
    recomputed = _aggregate(section["trials"], metric_name)
    for key, agg in section["aggregates"].items():
        ref = recomputed[key]
        if agg is None or ref is None:
            _check(agg is None and ref is None, f"{key} aggregate mismatch")
            continue
        for stat, value in ref.items():
            _check(abs(agg[stat] - value) <= 1e-12 * max(1.0, abs(value)),
                   f"{key}.{stat} not recomputable from trial records")


def validate_report(report: dict) -> None:
    """Check a report against the bundled schema; FormatError if invalid."""
    _check(isinstance(report, dict), "not an object")
    _check(report.get("schema") == REPORT_SCHEMA,
           f"schema tag {report.get('schema')!r} != {REPORT_SCHEMA!r}")
    _check(report.get("experiment") in ("sinc", "dataset", "sweep"),
           f"unknown experiment {report.get('experiment')!r}")
    env = report.get("environment")
    _check(isinstance(env, dict) and {"host", "timestamp"} <= set(env),
           "environment note incomplete")
    _check(isinstance(report.get("config"), dict), "config missing")
    metric_name = report.get("metric")
    _check(metric_name in ("rmse", "accuracy"),
           f"unknown metric {metric_name!r}")
    if report["experiment"] == "sweep":
        sweep = report.get("sweep")
        _check(isinstance(sweep, list) and sweep, "sweep section missing")
        for entry in sweep:
            _check(isinstance(entry.get("nodes"), int) and entry["nodes"] >= 1,
                   "sweep entry without node count")
            for section in entry["algorithms"].values():
                _validate_section(section, metric_name)
    else:
        algos = report.get("algorithms")
        _check(isinstance(algos, dict) and algos, "algorithms section missing")
        for section in algos.values():
            _validate_section(section, metric_name)


def report_all_failed(report: dict) -> bool:
    """True when every trial of every algorithm (at every node count)
    ended in a numeric failure."""
    sections = []
    if report["experiment"] == "sweep":
        for entry in report["sweep"]:
            sections.extend(entry["algorithms"].values())
    else:
        sections.extend(report["algorithms"].values())
    return all(section["failures"] == len(section["trials"])
               for section in sections)
