"""Training loop and the augmented-versus-plain comparison."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from ..dataio import Dataset, augment_dataset
from ..distributions import LambdaDistribution, make_rng, parse_spec
from ..errors import ConfigError, InputError, TrainingError
from .models import build_model, parse_model_spec
from .optim import make_optimizer

# Per-run substreams: SeedSequence(run_seed).spawn(3) -> (init, lambda, shuffle).
# The init stream does not depend on augmentation, so both arms of a
# comparison start from identical weights.
STREAM_INIT, STREAM_LAMBDA, STREAM_SHUFFLE = range(3)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 16
    learning_rate: float = 0.01
    optimizer: str = "adam"
    augmentation: LambdaDistribution | None = None
    factor: int = 4
    seeds: tuple = tuple(range(10))
    redraw_each_epoch: bool = False
    shuffle: bool = True

    def __post_init__(self):
        if self.epochs < 0 or int(self.epochs) != self.epochs:
            raise ConfigError("epochs must be a non-negative integer")
        if self.batch_size is not None and self.batch_size < 1:
            raise ConfigError("batch_size must be positive (or None for full batch)")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be positive")
        if self.optimizer not in ("sgd", "adam"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.factor < 1:
            raise ConfigError("augmentation factor must be at least 1")
        if len(self.seeds) < 1:
            raise ConfigError("need at least one seed")
        if self.augmentation is not None:
            object.__setattr__(self, "augmentation", parse_spec(self.augmentation))


@dataclass
class TrainReport:
    """Per-seed curves; index 0 of every curve is the untrained model."""

    seeds: tuple
    train_loss: np.ndarray
    test_loss: np.ndarray
    test_accuracy: np.ndarray
    final_params: list = field(default_factory=list, repr=False)

    @property
    def epochs(self) -> int:
        return self.test_accuracy.shape[1] - 1

    def mean(self, name):
        return getattr(self, name).mean(axis=0)

    def std(self, name):
        return getattr(self, name).std(axis=0)

    @property
    def final_accuracy_mean(self) -> float:
        return float(self.test_accuracy[:, -1].mean())

    @property
    def final_accuracy_std(self) -> float:
        return float(self.test_accuracy[:, -1].std())

    def curve_rows(self):
        rows = []
        for e in range(self.epochs + 1):
            rows.append({
                "epoch": e,
                "train_loss_mean": float(self.train_loss[:, e].mean()),
                "train_loss_std": float(self.train_loss[:, e].std()),
                "test_loss_mean": float(self.test_loss[:, e].mean()),
                "test_loss_std": float(self.test_loss[:, e].std()),
                "test_accuracy_mean": float(self.test_accuracy[:, e].mean()),
                "test_accuracy_std": float(self.test_accuracy[:, e].std()),
            })
        return rows

    def summary(self) -> dict:
        return {
            "seeds": len(self.seeds),
            "epochs": self.epochs,
            "final_test_accuracy_mean": self.final_accuracy_mean,
            "final_test_accuracy_std": self.final_accuracy_std,
            "final_test_loss_mean": float(self.test_loss[:, -1].mean()),
            "final_train_loss_mean": float(self.train_loss[:, -1].mean()),
        }


def curves_csv(rows, prefix_fields=()) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (format(v, ".17g") if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def _evaluate(model, X, y):
    g = model.pre_activation(X)
    loss = float(np.mean(np.logaddexp(0.0, g) - y * g))
    acc = float(np.mean((g > 0).astype(np.int64) == y))
    return loss, acc


def _check_binary(ds, name):
    if len(ds) == 0:
        raise InputError(f"{name} dataset is empty")
    if not set(np.unique(ds.y).tolist()) <= {0, 1}:
        raise InputError(f"{name} labels must be binary (0/1)")


def train_single(train_ds: Dataset, test_ds: Dataset, model_spec, config: TrainConfig, run_seed):
    """One training run; returns (train_loss, test_loss, test_acc, model)."""
    init_ss, lam_ss, shuf_ss = np.random.SeedSequence(run_seed).spawn(3)
    model = build_model(model_spec, train_ds.X.shape[1:], make_rng(init_ss))
    opt = make_optimizer(config.optimizer, model.params, config.learning_rate)
    lam_rng = make_rng(lam_ss)
    shuf_rng = make_rng(shuf_ss)

    def training_set():
        if config.augmentation is None:
            return train_ds
        return augment_dataset(train_ds, config.augmentation, config.factor, lam_rng)

    data = training_set()
    Xte, yte = test_ds.X, test_ds.y.astype(np.float64)
    tr_loss, te_loss, te_acc = [], [], []

    def record(epoch):
        l, _ = _evaluate(model, data.X, data.y.astype(np.float64))
        tl, ta = _evaluate(model, Xte, yte)
        if not (np.isfinite(l) and np.isfinite(tl)):
            raise TrainingError("non-finite loss", epoch=epoch)
        tr_loss.append(l)
        te_loss.append(tl)
        te_acc.append(ta)

    record(0)
    for epoch in range(1, config.epochs + 1):
        if config.redraw_each_epoch and epoch > 1:
            data = training_set()
        n = len(data)
        order = shuf_rng.permutation(n) if config.shuffle else np.arange(n)
        bs = n if config.batch_size is None else config.batch_size
        X, y = data.X, data.y.astype(np.float64)
        for start in range(0, n, bs):
            idx = order[start : start + bs]
            loss, grads = model.loss_and_grad(X[idx], y[idx])
            if not np.isfinite(loss):
                raise TrainingError("non-finite loss", epoch=epoch)
            opt.step(grads)
        record(epoch)
    return np.array(tr_loss), np.array(te_loss), np.array(te_acc), model


def train(train_ds: Dataset, test_ds: Dataset, model_spec, config: TrainConfig) -> TrainReport:
    _check_binary(train_ds, "training")
    _check_binary(test_ds, "test")
    if train_ds.X.shape[1:] != test_ds.X.shape[1:]:
        raise InputError("training and test series have different shapes")
    model_spec = parse_model_spec(model_spec)
    runs = [train_single(train_ds, test_ds, model_spec, config, s) for s in config.seeds]
    return TrainReport(
        seeds=tuple(config.seeds),
        train_loss=np.stack([r[0] for r in runs]),
        test_loss=np.stack([r[1] for r in runs]),
        test_accuracy=np.stack([r[2] for r in runs]),
        final_params=[r[3].get_flat() for r in runs],
    )


@dataclass
class CompareReport:
    augmented: TrainReport
    plain: TrainReport

    @property
    def accuracy_delta(self) -> np.ndarray:
        """Per-epoch mean test accuracy, augmented minus plain."""
        return self.augmented.mean("test_accuracy") - self.plain.mean("test_accuracy")

    @property
    def final_accuracy_delta(self) -> float:
        return self.augmented.final_accuracy_mean - self.plain.final_accuracy_mean

    @property
    def final_std_delta(self) -> float:
        return self.augmented.final_accuracy_std - self.plain.final_accuracy_std

    def summary(self) -> dict:
        return {
            "augmented": self.augmented.summary(),
            "plain": self.plain.summary(),
            "final_accuracy_delta": self.final_accuracy_delta,
            "final_std_delta": self.final_std_delta,
        }

    def curve_rows(self):
        rows = []
        for arm, rep in (("augmented", self.augmented), ("plain", self.plain)):
            for r in rep.curve_rows():
                rows.append({"arm": arm, **r})
        return rows


def compare_experiment(train_ds, test_ds, model_spec, config: TrainConfig, plain_config=None) -> CompareReport:
    """Run the same config with and without augmentation.

    ``plain_config`` overrides the control arm (defaults to ``config`` with
    augmentation removed); it exists so a control-versus-control run can be
    expressed.
    """
    if config.augmentation is None:
        raise ConfigError("compare_experiment needs an augmentation distribution")
    plain_config = plain_config or replace(config, augmentation=None)
    return CompareReport(
        augmented=train(train_ds, test_ds, model_spec, config),
        plain=train(train_ds, test_ds, model_spec, plain_config),
    )
