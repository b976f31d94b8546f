"""Dataset handling: CSV ingestion, the sinc generator, splits, metrics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import FormatError, PreconditionError, ShapeError

__all__ = [
    "REGRESSION", "CLASSIFICATION", "Dataset", "CsvSchema", "load_csv",
    "sinc", "gen_sinc", "split", "rmse", "classification_rate",
    "one_hot_encode", "one_hot_decode", "minmax_scale",
]

REGRESSION = "regression"
CLASSIFICATION = "classification"


@dataclass(frozen=True)
class Dataset:
    """Labeled samples: inputs (n x d) and targets (n x m).

    Regression targets are raw values (m columns); classification
    targets are one-hot rows over ``class_labels``.
    """

    name: str
    task: str
    inputs: np.ndarray
    targets: np.ndarray
    class_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        if inputs.ndim != 2 or targets.ndim != 2:
            raise ShapeError("inputs and targets must be 2-D")
        if inputs.shape[0] != targets.shape[0]:
            raise ShapeError(
                f"{inputs.shape[0]} inputs but {targets.shape[0]} targets")
        if inputs.shape[0] < 1:
            raise PreconditionError("dataset must contain at least one sample")
        if not (np.isfinite(inputs).all() and np.isfinite(targets).all()):
            raise PreconditionError("dataset contains non-finite values")
        if self.task not in (REGRESSION, CLASSIFICATION):
            raise PreconditionError(f"unknown task {self.task!r}")
        if self.task == CLASSIFICATION:
            ok = np.isin(targets, (0.0, 1.0)).all() and \
                (targets.sum(axis=1) == 1.0).all()
            if not ok:
                raise PreconditionError(
                    "classification targets must be one-hot rows")
            if self.class_labels is not None and \
                    len(self.class_labels) != targets.shape[1]:
                raise ShapeError("class_labels length does not match targets")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        if self.class_labels is not None:
            object.__setattr__(self, "class_labels", tuple(self.class_labels))

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_features(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.targets.shape[1]


def one_hot_encode(labels: Sequence[str]):
    """Map labels to one-hot rows; classes ordered by first appearance."""
    classes: list[str] = []
    index: dict[str, int] = {}
    for lab in labels:
        if lab not in index:
            index[lab] = len(classes)
            classes.append(lab)
    rows = np.zeros((len(labels), len(classes)))
    for i, lab in enumerate(labels):
        rows[i, index[lab]] = 1.0
    return rows, classes


def one_hot_decode(rows, classes: Sequence[str]) -> list[str]:
    """Invert one-hot (or score) rows back to labels via argmax."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != len(classes):
        raise ShapeError("rows do not match the class list")
    return [classes[j] for j in rows.argmax(axis=1)]


@dataclass(frozen=True)
class CsvSchema:
    """Which CSV columns are targets and what task they encode."""

    target: str | tuple[str, ...]
    task: str = REGRESSION
    name: str = ""

    @property
    def target_columns(self) -> tuple[str, ...]:
        if isinstance(self.target, str):
            return (self.target,)
        return tuple(self.target)


def load_csv(path, schema: CsvSchema) -> Dataset:
    """Load an RFC-4180-style CSV (header row required, UTF-8).

    Non-target columns are numeric attributes; a cell that does not
    parse is rejected with its 1-based data-row and column numbers.
    Classification label columns may hold arbitrary strings and are
    one-hot encoded in first-seen order.
    """
    if schema.task not in (REGRESSION, CLASSIFICATION):
        raise PreconditionError(f"unknown task {schema.task!r}")
    targets_wanted = schema.target_columns
    if schema.task == CLASSIFICATION and len(targets_wanted) != 1:
        raise PreconditionError(
            "classification expects exactly one label column")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise FormatError("empty file, header row required", path=str(path))
            rows = list(reader)
    except OSError as exc:
        raise FormatError(f"cannot read CSV: {exc}", path=str(path)) from exc

    header = [h.strip() for h in header]
    for col in targets_wanted:
        if col not in header:
            raise FormatError(f"target column {col!r} not in header {header}",
                              path=str(path))
    tgt_idx = [header.index(c) for c in targets_wanted]
    feat_idx = [j for j in range(len(header)) if j not in tgt_idx]
    if not feat_idx:
        raise FormatError("no attribute columns left after removing targets",
                          path=str(path))
    if not rows:
        raise FormatError("no data rows", path=str(path))

    feats = np.empty((len(rows), len(feat_idx)))
    raw_targets: list[list[str]] = []
    for i, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise FormatError(
                f"row has {len(row)} cells, header has {len(header)}",
                path=str(path), line=i)
        for k, j in enumerate(feat_idx):
            try:
                feats[i - 1, k] = float(row[j])
            except ValueError:
                raise FormatError(
                    f"cell {row[j]!r} is not numeric",
                    path=str(path), line=i, column=j + 1) from None
        raw_targets.append([row[j].strip() for j in tgt_idx])

    name = schema.name or str(path)
    if schema.task == REGRESSION:
        targets = np.empty((len(rows), len(tgt_idx)))
        for i, cells in enumerate(raw_targets, start=1):
            for k, cell in enumerate(cells):
                try:
                    targets[i - 1, k] = float(cell)
                except ValueError:
                    raise FormatError(
                        f"target cell {cell!r} is not numeric",
                        path=str(path), line=i,
                        column=tgt_idx[k] + 1) from None
        return Dataset(name, REGRESSION, feats, targets)
    labels = [cells[0] for cells in raw_targets]
    onehot, classes = one_hot_encode(labels)
    if len(classes) < 2:
        raise FormatError("classification needs at least two distinct labels",
                          path=str(path))
    return Dataset(name, CLASSIFICATION, feats, onehot,
                   class_labels=tuple(classes))


def sinc(x):
    """sin(x)/x with the removable singularity patched to 1 at x = 0."""
    x = np.asarray(x, dtype=np.float64)
    out = np.ones_like(x)
    nz = x != 0.0
    out[nz] = np.sin(x[nz]) / x[nz]
    return out


def gen_sinc(n_train: int, n_test: int, seed: int, noise_sigma: float = 0.0,
             test_distribution: str = "uniform"):
    """The sinc benchmark: grid training data, wider-range test data.

    Training inputs are a uniform grid on [-10, 10] inclusive; test
    inputs are random on [-30, 30], drawn uniformly by default or from
    a truncated standard normal scaled to the interval
    (``test_distribution="normal"``). Optional Gaussian noise (standard
    deviation ``noise_sigma``) is added to the training targets only.
    """
    if n_train < 2:
        raise PreconditionError(f"need n_train >= 2, got {n_train}")
    if n_test < 1:
        raise PreconditionError(f"need n_test >= 1, got {n_test}")
    if noise_sigma < 0:
        raise PreconditionError("noise_sigma must be >= 0")
    rng = np.random.default_rng(seed)
    xtr = np.linspace(-10.0, 10.0, n_train)
    ytr = sinc(xtr)
    if noise_sigma > 0.0:
        ytr = ytr + rng.normal(0.0, noise_sigma, n_train)
    if test_distribution == "uniform":
        xte = rng.uniform(-30.0, 30.0, n_test)
    elif test_distribution == "normal":
        xte = np.empty(n_test)
        for i in range(n_test):
            z = rng.standard_normal()
            while abs(z) > 3.0:
                z = rng.standard_normal()
            xte[i] = 10.0 * z
    else:
        raise PreconditionError(
            f"unknown test_distribution {test_distribution!r}")
    train = Dataset("sinc-train", REGRESSION, xtr[:, None], ytr[:, None])
    test = Dataset("sinc-test", REGRESSION, xte[:, None], sinc(xte)[:, None])
    return train, test


def split(data: Dataset, fraction: float, seed: int):
    """Random disjoint partition into (train, test), seed-deterministic.

    The training side takes ceil(fraction * n) samples, the test side
    the remainder; both must end up non-empty.
    """
    if not 0.0 < fraction < 1.0:
        raise PreconditionError(f"fraction must be in (0, 1), got {fraction}")
    n = data.n_samples
    n_train = math.ceil(fraction * n)
    if n_train >= n or n_train < 1:
        raise PreconditionError(
            f"split of {n} samples at {fraction} leaves an empty side")
    perm = np.random.default_rng(seed).permutation(n)
    tr, te = perm[:n_train], perm[n_train:]
    train = replace(data, name=data.name + "/train",
                    inputs=data.inputs[tr], targets=data.targets[tr])
    test = replace(data, name=data.name + "/test",
                   inputs=data.inputs[te], targets=data.targets[te])
    return train, test


def rmse(pred, target) -> float:
    """Root mean squared deviation over all n*m entries."""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeError(f"shape mismatch {p.shape} vs {t.shape}")
    return float(np.sqrt(np.mean((p - t) ** 2)))


def classification_rate(pred, target) -> float:
    """Fraction of rows whose argmax matches (ties to the lowest index)."""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeError(f"shape mismatch {p.shape} vs {t.shape}")
    if p.ndim != 2 or p.shape[1] < 2:
        raise ShapeError("need score rows over at least two classes")
    return float(np.mean(p.argmax(axis=1) == t.argmax(axis=1)))


def minmax_scale(data: Dataset, low: float = -1.0, high: float = 1.0) -> Dataset:
    """Rescale each attribute to [low, high]; constant attributes go to
    the midpoint. Targets are left untouched."""
    if not low < high:
        raise PreconditionError("need low < high")
    x = data.inputs
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    spread = hi - lo
    mid = np.full_like(x, (low + high) / 2.0)
    scaled = np.where(spread > 0.0,
                      low + (x - lo) * ((high - low) / np.where(spread > 0.0, spread, 1.0)),
                      mid)
    return replace(data, name=data.name + "/scaled", inputs=scaled)
