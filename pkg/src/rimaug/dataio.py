"""Dataset container, the label-first CSV format, and dataset-level helpers.

File format: one sample per line, ``label,x_0,x_1,...,x_d``. Lines starting
with ``#`` and blank lines are ignored. Values are written with 17
significant digits so doubles round-trip exactly.
"""

from __future__ import annotations

import io
import os

import numpy as np

from .core import TimeSeriesSample, check_lambda, rim_batch
from .distributions import parse_spec, sample_lambda, make_rng
from .errors import ConfigError, DimensionError, FormatError, InputError, ParseError


class Dataset:
    """Equal-length labelled series stored as a feature matrix and a label vector."""

    def __init__(self, X, y, labels=None):
        X = np.array(X, dtype=np.float64)
        y = np.asarray(y)
        if X.ndim == 1:
            X = X[None]
        if X.shape[0] == 0:
            raise InputError("dataset is empty")
        if X.ndim not in (2, 3):
            raise DimensionError(f"features must be (n, d+1) or (n, d+1, C), got {X.shape}")
        if y.shape != (X.shape[0],):
            raise DimensionError(f"{y.shape[0] if y.ndim else 0} labels for {X.shape[0]} samples")
        if not np.all(np.isfinite(X)):
            raise InputError("features must be finite")
        if y.size and not (np.all(y == np.round(y)) and np.all(y >= 0)):
            raise InputError("labels must be non-negative integers")
        y = y.astype(np.int64)
        self.labels = tuple(sorted(set(int(v) for v in y))) if labels is None else tuple(labels)
        if not set(int(v) for v in y) <= set(self.labels):
            raise InputError(f"labels outside declared set {self.labels}")
        X.setflags(write=False)
        y.setflags(write=False)
        self.X = X
        self.y = y

    def __len__(self):
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1] - 1

    @property
    def samples(self):
        return [TimeSeriesSample(x, int(l)) for x, l in zip(self.X, self.y)]

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, idx):
        if isinstance(idx, (int, np.integer)):
            return TimeSeriesSample(self.X[idx], int(self.y[idx]))
        return Dataset(self.X[idx], self.y[idx], labels=self.labels)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.X, other.X) and np.array_equal(self.y, other.y)

    __hash__ = None

    def label_counts(self) -> dict:
        values, counts = np.unique(self.y, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    @classmethod
    def from_samples(cls, samples, labels=None):
        samples = list(samples)
        if not samples:
            raise InputError("dataset is empty")
        lengths = {s.features.shape for s in samples}
        if len(lengths) != 1:
            raise DimensionError(f"ragged samples: shapes {sorted(lengths)}")
        return cls(np.stack([s.features for s in samples]), [s.label for s in samples], labels)

    def concat(self, other: "Dataset") -> "Dataset":
        return Dataset(np.concatenate([self.X, other.X]), np.concatenate([self.y, other.y]),
                       labels=tuple(sorted(set(self.labels) | set(other.labels))))


def format_value(v: float) -> str:
    return format(float(v), ".17g")


def dumps(dataset: Dataset) -> str:
    if dataset is None or len(dataset) == 0:
        raise InputError("refusing to write an empty dataset")
    if dataset.X.ndim != 2:
        raise DimensionError("the file format holds scalar-valued series only")
    buf = io.StringIO()
    for x, label in zip(dataset.X, dataset.y):
        buf.write(str(int(label)))
        for v in x:
            buf.write(",")
            buf.write(format_value(v))
        buf.write("\n")
    return buf.getvalue()


def loads(text: str) -> Dataset:
    rows, labels = [], []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
            if width < 2:
                raise FormatError("need a label and at least one value", line=lineno)
        elif len(fields) != width:
            raise FormatError(f"expected {width} fields, found {len(fields)}", line=lineno)
        try:
            label = int(fields[0])
        except ValueError:
            raise ParseError(f"label {fields[0]!r} is not an integer", line=lineno, field=1) from None
        if label < 0:
            raise ParseError(f"negative label {label}", line=lineno, field=1)
        values = []
        for col, f in enumerate(fields[1:], start=2):
            try:
                v = float(f)
            except ValueError:
                raise ParseError(f"{f.strip()!r} is not a number", line=lineno, field=col) from None
            if not np.isfinite(v):
                raise ParseError(f"non-finite value {f.strip()!r}", line=lineno, field=col)
            values.append(v)
        rows.append(values)
        labels.append(label)
    if not rows:
        raise InputError("dataset file contains no samples")
    return Dataset(np.array(rows), np.array(labels))


def read_dataset(path) -> Dataset:
    if not os.path.exists(path):
        raise InputError(f"no such file: {path}")
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write_dataset(dataset: Dataset, path) -> None:
    text = dumps(dataset)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def augment_dataset(dataset: Dataset, spec, K: int, seed=None) -> Dataset:
    """Original samples followed by ``K`` augmented blocks.

    Block ``k`` holds one augmented copy of every sample, each with an
    independent lambda draw. Labels are carried per sample, so
    augmentation never mixes classes.
    """
    if int(K) != K or K < 1:
        raise ConfigError(f"K must be a positive integer, got {K}")
    spec = parse_spec(spec)
    n, d = len(dataset), dataset.d
    rng = make_rng(seed)
    lam = check_lambda(sample_lambda(spec, (K * n, d), rng), d)
    X = np.concatenate([dataset.X] * K)
    aug = rim_batch(X, lam)
    return Dataset(np.concatenate([dataset.X, aug]), np.concatenate([dataset.y] * (K + 1)),
                   labels=dataset.labels)


def sliding_window(series, n: int):
    """``(window, next_value)`` pairs for one-step-ahead forecasting."""
    x = np.asarray(series, dtype=np.float64)
    if n < 1:
        raise InputError("window length must be at least 1")
    if x.shape[0] < n + 1:
        raise InputError(f"series of length {x.shape[0]} too short for window {n}")
    return [(x[i : i + n].copy(), x[i + n]) for i in range(x.shape[0] - n)]
