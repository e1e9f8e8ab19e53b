"""Recursive interpolation of time series.

Each augmented coordinate is a running convex combination of the raw prefix::

    x'_0 = x_0
    x'_i = (1 - lam_i) * x_i + lam_i * x'_{i-1},   lam_i in [0, 1)

Features may be scalar per timestep, shape ``(d + 1,)``, or multichannel,
shape ``(d + 1, C)``. In the multichannel case every channel of timestep ``i``
shares ``lam_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import _kernels
from .errors import DimensionError, DomainError, IndexRangeError, InputError


@dataclass(frozen=True)
class TimeSeriesSample:
    """One labelled realization ``(x_0, ..., x_d; y)``."""

    features: np.ndarray
    label: int = 0

    def __post_init__(self):
        x = np.array(self.features, dtype=np.float64)
        if x.ndim not in (1, 2) or x.shape[0] < 1:
            raise DimensionError(f"features must have shape (d+1,) or (d+1, C), got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise InputError("features must be finite")
        label = int(self.label)
        if label != self.label or label < 0:
            raise InputError(f"label must be a non-negative integer, got {self.label!r}")
        x.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "label", label)

    @property
    def d(self) -> int:
        return self.features.shape[0] - 1

    def __eq__(self, other):
        if not isinstance(other, TimeSeriesSample):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.features, other.features)

    __hash__ = None


@dataclass(frozen=True)
class AugmentedSample:
    features: np.ndarray
    label: int
    source: Any = None
    lam: np.ndarray = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.features.shape[0] - 1


def _as_sample(sample) -> TimeSeriesSample:
    if isinstance(sample, TimeSeriesSample):
        return sample
    return TimeSeriesSample(sample)


def check_lambda(lam, d: int) -> np.ndarray:
    """Validate interpolation coefficients for a series of length ``d + 1``.

    Accepts a single vector (d,) or a stack (K, d).
    """
    lam = np.asarray(lam, dtype=np.float64)
    if lam.ndim == 0 or lam.shape[-1] != d:
        raise DimensionError(f"lambda has shape {lam.shape}, sample needs d = {d}")
    if lam.size and not (np.all(lam >= 0.0) and np.all(lam < 1.0)):
        raise DomainError("every lambda_i must lie in [0, 1)")
    return lam


def rim_batch(features, lam, shared: bool = False) -> np.ndarray:
    """Vectorised recursion over a batch.

    Parameters
    ----------
    features : array
        (n, d+1) or (n, d+1, C); with ``shared=True`` a single series
        (d+1,) or (d+1, C) augmented under every row of ``lam``.
    lam : array, shape (n, d)
        Interpolation coefficients, assumed already validated.

    Returns
    -------
    ndarray of shape (n, d+1) or (n, d+1, C).
    """
    x = np.asarray(features, dtype=np.float64)
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    if lam.ndim != 2:
        raise DimensionError("lam must be 2-D (n, d)")
    if shared:
        if x.shape[0] != lam.shape[1] + 1:
            raise DimensionError(f"series length {x.shape[0]} incompatible with lambda {lam.shape}")
        x2 = np.ascontiguousarray(x.reshape(x.shape[0], -1))
        out = _kernels.rim_forward_shared(x2, lam)
        return out[..., 0] if x.ndim == 1 else out
    x3 = np.ascontiguousarray(x.reshape(x.shape[0], x.shape[1], -1))
    if x3.shape[0] != lam.shape[0] or x3.shape[1] != lam.shape[1] + 1:
        raise DimensionError(f"features {x.shape} incompatible with lambda {lam.shape}")
    out = _kernels.rim_forward(x3, lam)
    return out[..., 0] if x.ndim == 2 else out


def augment_recursive(sample, lam) -> AugmentedSample:
    """Apply the recursion in a single forward pass."""
    s = _as_sample(sample)
    lam = check_lambda(np.asarray(lam, dtype=np.float64).reshape(-1), s.d)
    out = rim_batch(s.features[None], lam[None])[0]
    out.setflags(write=False)
    return AugmentedSample(out, s.label, source=s, lam=lam)


def closed_form_coefficients(lam, n: int) -> np.ndarray:
    """Weights ``c_0..c_n`` with ``x'_n = sum_k c_k x_k``.

    ``c_k = (prod_{i=k+1}^{n} lam_i) * g_k`` where ``g_0 = 1`` and
    ``g_k = 1 - lam_k`` for ``k >= 1``.
    """
    lam = np.asarray(lam, dtype=np.float64).reshape(-1)
    d = lam.shape[0]
    if not 0 <= n <= d:
        raise IndexRangeError(f"n = {n} outside [0, {d}]")
    if lam.size and not (np.all(lam >= 0.0) and np.all(lam < 1.0)):
        raise DomainError("every lambda_i must lie in [0, 1)")
    # tail[k] = prod_{i=k+1}^{n} lam_i ; lam_i lives at lam[i - 1]
    tail = np.ones(n + 1)
    if n > 0:
        tail[:n] = np.cumprod(lam[:n][::-1])[::-1]
    g = np.empty(n + 1)
    g[0] = 1.0
    g[1:] = 1.0 - lam[:n]
    return tail * g


def coefficient_matrix(lam) -> np.ndarray:
    """Lower-triangular (d+1, d+1) matrix whose row ``n`` is the closed form."""
    lam = np.asarray(lam, dtype=np.float64).reshape(-1)
    d = lam.shape[0]
    full = np.concatenate([[1.0], lam])  # index i holds lam_i; slot 0 unused
    n_idx = np.arange(d + 1)[:, None]
    i_idx = np.arange(d + 1)[None, :]
    # factors[n, i] = lam_i for 1 <= i <= n, else 1
    factors = np.where((i_idx <= n_idx) & (i_idx >= 1), full[None, :], 1.0)
    # suffix[n, j] = prod_{i >= j} factors[n, i]; column d+1 is the empty product
    suffix = np.ones((d + 1, d + 2))
    suffix[:, : d + 1] = np.cumprod(factors[:, ::-1], axis=1)[:, ::-1]
    g = np.concatenate([[1.0], 1.0 - lam])
    C = suffix[:, 1:] * g[None, :]
    return np.tril(C)


def augment_closed_form(sample, lam) -> AugmentedSample:
    """Same output as :func:`augment_recursive`, via the coefficient expansion."""
    s = _as_sample(sample)
    lam = check_lambda(np.asarray(lam, dtype=np.float64).reshape(-1), s.d)
    out = coefficient_matrix(lam) @ s.features
    out.setflags(write=False)
    return AugmentedSample(out, s.label, source=s, lam=lam)


def augment_many(sample, lams) -> np.ndarray:
    """Augment one sample under each row of ``lams`` (shape (K, d))."""
    s = _as_sample(sample)
    lams = np.asarray(lams, dtype=np.float64)
    if lams.ndim == 1:
        lams = lams[None]
    lams = check_lambda(lams, s.d)
    return rim_batch(s.features, lams, shared=True)
