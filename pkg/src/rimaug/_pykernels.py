"""Pure numpy fallback for the compiled RIM kernels (same signatures)."""

import numpy as np


def rim_forward(x, lam):
    x = np.asarray(x, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    out = np.empty_like(x)
    out[:, 0] = x[:, 0]
    for i in range(1, x.shape[1]):
        l = lam[:, i - 1, None]
        out[:, i] = np.where(l == 0.0, x[:, i], (1.0 - l) * x[:, i] + l * out[:, i - 1])
    return out


def rim_forward_shared(x, lam):
    x = np.asarray(x, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    n = lam.shape[0]
    out = np.empty((n,) + x.shape)
    out[:, 0] = x[0]
    for i in range(1, x.shape[0]):
        l = lam[:, i - 1, None]
        out[:, i] = np.where(l == 0.0, x[i], (1.0 - l) * x[i] + l * out[:, i - 1])
    return out
