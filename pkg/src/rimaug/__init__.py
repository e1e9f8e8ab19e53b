"""Recursive interpolation augmentation for time series."""

from ._kernels import BACKEND
from .core import (
    AugmentedSample,
    TimeSeriesSample,
    augment_closed_form,
    augment_many,
    augment_recursive,
    closed_form_coefficients,
    coefficient_matrix,
    rim_batch,
)
from .distributions import LambdaDistribution, distribution_mean, parse_spec, sample_lambda
from .dataio import Dataset, augment_dataset, read_dataset, sliding_window, write_dataset

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AugmentedSample", "Dataset", "LambdaDistribution", "TimeSeriesSample",
    "augment_closed_form", "augment_dataset", "augment_many", "augment_recursive",
    "closed_form_coefficients", "coefficient_matrix", "distribution_mean", "parse_spec",
    "read_dataset", "rim_batch", "sample_lambda", "sliding_window", "write_dataset",
]
