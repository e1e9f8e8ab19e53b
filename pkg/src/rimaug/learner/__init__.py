"""Models, training, and estimator-variance experiments."""

from .models import (
    Conv1D,
    Logistic,
    MLP,
    ModelSpec,
    build_model,
    cross_entropy_loss,
    parse_model_spec,
    sigmoid,
)
from .optim import SGD, Adam
from .training import CompareReport, TrainConfig, TrainReport, compare_experiment, train
from .variance import VarianceReport, analytic_trace_sigma0, variance_experiment
from .experiments import synthetic_datasets, synthetic_experiment

__all__ = [
    "Adam", "CompareReport", "Conv1D", "Logistic", "MLP", "ModelSpec", "SGD",
    "TrainConfig", "TrainReport", "VarianceReport", "analytic_trace_sigma0",
    "build_model", "compare_experiment", "cross_entropy_loss", "parse_model_spec",
    "sigmoid", "synthetic_datasets", "synthetic_experiment", "train", "variance_experiment",
]
