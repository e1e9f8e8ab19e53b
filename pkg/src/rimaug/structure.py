"""Derivatives of augmented coordinates with respect to the coefficients.

Indexing follows the time axis: ``lam_j`` (``1 <= j <= d``) is stored at
``lam[j - 1]``. Writing ``x'`` for the augmented series and ``P(a..b)`` for
``prod_{k=a}^{b} lam_k``::

    dx'_i/dlam_j = 0                              i < j
                 = x'_{i-1} - x_i                 i = j
                 = P(j+1..i) (x'_{j-1} - x_j)     i > j

The velocity matrix ``A`` and acceleration matrices ``B_i`` collect first
and second derivatives at ``lam = 0``; row ``j`` is the coefficient, column
``l`` the coordinate, and row/column 0 are zero padding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import _as_sample, augment_recursive, check_lambda
from .errors import DimensionError, DomainError, IndexRangeError

FD_STEP_FIRST = 1e-5
FD_STEP_SECOND = 1e-3


def _prod(lam, lo, hi, skip=None):
    """prod_{k=lo}^{hi} lam_k, optionally omitting k = skip."""
    out = 1.0
    for k in range(lo, hi + 1):
        if k != skip:
            out *= lam[k - 1]
    return out


def _check_index(i, d, name):
    if not 1 <= i <= d:
        raise IndexRangeError(f"{name} = {i} outside [1, {d}]")


def _setup(sample, lam):
    s = _as_sample(sample)
    if s.features.ndim != 1:
        raise DimensionError("derivatives are defined for scalar-valued series")
    lam = check_lambda(np.asarray(lam, dtype=np.float64).reshape(-1), s.d)
    xa = augment_recursive(s, lam).features
    return s.features, lam, xa


def _first(x, lam, xa, i, j):
    if i < j:
        return 0.0
    return _prod(lam, j + 1, i) * (xa[j - 1] - x[j])


def _second(x, lam, xa, i, j, l):
    # d^2 x'_l / (dlam_i dlam_j); symmetric in (i, j)
    if i > l or j > l or i == j:
        return 0.0
    if i > j:
        return _prod(lam, j + 1, l, skip=i) * (xa[j - 1] - x[j])
    return _prod(lam, j + 1, l) * _first(x, lam, xa, j - 1, i)


def partial_derivative(sample, lam, i: int, j: int) -> float:
    """``dx'_i / dlam_j`` for ``1 <= i, j <= d``."""
    x, lam, xa = _setup(sample, lam)
    _check_index(i, len(lam), "i")
    _check_index(j, len(lam), "j")
    return float(_first(x, lam, xa, i, j))


def second_partial_derivative(sample, lam, i: int, j: int, l: int) -> float:
    """``d^2 x'_l / (dlam_i dlam_j)`` for indices in ``[1, d]``."""
    x, lam, xa = _setup(sample, lam)
    d = len(lam)
    _check_index(i, d, "i")
    _check_index(j, d, "j")
    _check_index(l, d, "l")
    return float(_second(x, lam, xa, i, j, l))


@dataclass(frozen=True)
class StructureMatrices:
    A: np.ndarray
    B: list

    @property
    def d(self) -> int:
        return self.A.shape[0] - 1

    def to_text(self, precision: int = 17) -> str:
        def grid(M):
            return "\n".join(" ".join(format(v, f".{precision}g") for v in row) for row in M)

        parts = ["A", grid(self.A)]
        for i, Bi in enumerate(self.B, start=1):
            parts += [f"B_{i}", grid(Bi)]
        return "\n".join(parts) + "\n"


def velocity_matrix_at_zero(sample) -> np.ndarray:
    s = _as_sample(sample)
    d = s.d
    A = np.zeros((d + 1, d + 1))
    if d == 0:
        return A
    x, lam, xa = _setup(s, np.zeros(d))
    for j in range(1, d + 1):
        for l in range(j, d + 1):
            A[j, l] = _first(x, lam, xa, l, j)
    return A


def acceleration_matrices_at_zero(sample) -> list:
    s = _as_sample(sample)
    d = s.d
    if d == 0:
        return []
    x, lam, xa = _setup(s, np.zeros(d))
    out = []
    for i in range(1, d + 1):
        Bi = np.zeros((d + 1, d + 1))
        for j in range(1, d + 1):
            for l in range(j, d + 1):
                Bi[j, l] = _second(x, lam, xa, i, j, l)
        out.append(Bi)
    return out


def structure_matrices(sample) -> StructureMatrices:
    return StructureMatrices(velocity_matrix_at_zero(sample), acceleration_matrices_at_zero(sample))


def taylor_loss_bound(matrices: StructureMatrices, grad_g) -> float:
    """``sqrt(d) (|A|_F + sum_i |B_i|_F) |grad_g|``."""
    grad_g = np.asarray(grad_g, dtype=np.float64).reshape(-1)
    if grad_g.shape[0] != matrices.A.shape[0]:
        raise DimensionError(f"grad_g has length {grad_g.shape[0]}, expected {matrices.A.shape[0]}")
    total = np.linalg.norm(matrices.A) + sum(np.linalg.norm(Bi) for Bi in matrices.B)
    return float(np.sqrt(matrices.d) * total * np.linalg.norm(grad_g))


@dataclass(frozen=True)
class LossGap:
    scale: float
    gap: float
    bound: float


def empirical_loss_gap(sample, lam, model, scale: float) -> LossGap:
    """Loss change under ``scale * lam`` next to the first-order bound.

    ``model`` must expose ``loss(features, label)`` and
    ``input_gradient(features)`` (gradient of the last pre-activation).
    """
    if not 0.0 < scale <= 1.0:
        raise DomainError(f"scale must lie in (0, 1], got {scale}")
    s = _as_sample(sample)
    lam = check_lambda(np.asarray(lam, dtype=np.float64).reshape(-1), s.d)
    xs = augment_recursive(s, scale * lam).features
    gap = abs(model.loss(xs, s.label) - model.loss(s.features, s.label))
    bound = taylor_loss_bound(structure_matrices(s), model.input_gradient(s.features))
    return LossGap(scale, float(gap), bound)


# -- finite-difference oracle -------------------------------------------------
# Works on the raw polynomial recursion so that lam may step below zero.


def raw_recursion(x, lam) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    out[0] = x[0]
    for i in range(1, len(x)):
        out[i] = (1.0 - lam[i - 1]) * x[i] + lam[i - 1] * out[i - 1]
    return out


def fd_first(x, lam, i, j, h=FD_STEP_FIRST) -> float:
    lp = np.array(lam, dtype=np.float64)
    lm = lp.copy()
    lp[j - 1] += h
    lm[j - 1] -= h
    return (raw_recursion(x, lp)[i] - raw_recursion(x, lm)[i]) / (2 * h)


def fd_second(x, lam, i, j, l, h=FD_STEP_SECOND) -> float:
    lam = np.array(lam, dtype=np.float64)

    def f(di, dj):
        v = lam.copy()
        v[i - 1] += di
        v[j - 1] += dj
        return raw_recursion(x, v)[l]

    return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)


def fd_structure_matrices(sample) -> StructureMatrices:
    x = _as_sample(sample).features
    d = len(x) - 1
    zero = np.zeros(d)
    A = np.zeros((d + 1, d + 1))
    B = [np.zeros((d + 1, d + 1)) for _ in range(d)]
    for j in range(1, d + 1):
        for l in range(1, d + 1):
            A[j, l] = fd_first(x, zero, l, j)
            for i in range(1, d + 1):
                B[i - 1][j, l] = fd_second(x, zero, i, j, l)
    return StructureMatrices(A, B)


def compare_with_oracle(sample, rtol=1e-4, atol=1e-8) -> dict:
    """Max deviations of the analytic A, B_i from the finite-difference oracle."""
    ana = structure_matrices(sample)
    fd = fd_structure_matrices(sample)
    pairs = [(ana.A, fd.A)] + list(zip(ana.B, fd.B))
    max_abs = 0.0
    ok = True
    for a, b in pairs:
        diff = np.abs(a - b)
        max_abs = max(max_abs, float(diff.max()) if diff.size else 0.0)
        ok &= bool(np.all(diff <= np.maximum(atol, rtol * np.abs(b))))
    return {"max_abs_error": max_abs, "passed": ok}
