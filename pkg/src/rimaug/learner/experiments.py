"""Desk-scale reproduction of the synthetic ODE classification comparison."""

from __future__ import annotations

from dataclasses import replace

from ..distributions import as_seed_sequence
from ..synthgen import generate_dataset
from .models import ModelSpec
from .training import TrainConfig, compare_experiment

DEFAULT_MODEL = ModelSpec("conv1d", kernel_size=3, filters=8)
DEFAULT_CONFIG = TrainConfig(
    epochs=50,
    batch_size=16,
    learning_rate=0.01,
    optimizer="adam",
    augmentation="uniform",
    factor=4,
    seeds=tuple(range(10)),
)


def synthetic_datasets(task, n_train=25, n_test=100, seed=0, **ode):
    """Train/test sets drawn from independent substreams of ``seed``."""
    tr_ss, te_ss = as_seed_sequence(seed).spawn(2)
    return (
        generate_dataset(task, n_train, tr_ss, **ode),
        generate_dataset(task, n_test, te_ss, **ode),
    )


def synthetic_experiment(task, spec="uniform", n_train=25, n_test=100, seed=0,
                         model=DEFAULT_MODEL, config=DEFAULT_CONFIG, **ode):
    train_ds, test_ds = synthetic_datasets(task, n_train, n_test, seed, **ode)
    config = replace(config, augmentation=spec)
    return compare_experiment(train_ds, test_ds, model, config)
