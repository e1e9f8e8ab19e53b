"""Small binary classifiers with hand-written backpropagation.

Every model has the form ``p = sigmoid(g(x))`` where ``g`` is the last
pre-activation. Hidden layers use ReLU, so ``g`` is piecewise linear in the
input and ``input_gradient`` returns its (locally constant) gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..distributions import make_rng
from ..errors import ConfigError, DimensionError

PROB_EPS = 1e-12


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def cross_entropy_loss(probability, label):
    """Negative log-likelihood of a Bernoulli label, with clamped probability."""
    p = np.clip(np.asarray(probability, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)
    y = np.asarray(label, dtype=np.float64)
    out = -(y * np.log(p) + (1.0 - y) * np.log1p(-p))
    return float(out) if out.ndim == 0 else out


def _logit_loss(g, y):
    # -[y log s(g) + (1-y) log(1-s(g))] = softplus(g) - y g, stable for any g
    return np.logaddexp(0.0, g) - y * g


@dataclass(frozen=True)
class ModelSpec:
    architecture: str = "conv1d"
    hidden: tuple = ()
    kernel_size: int = 3
    filters: int = 8

    def __post_init__(self):
        if self.architecture not in ("logistic", "mlp", "conv1d"):
            raise ConfigError(f"unknown architecture {self.architecture!r}")
        if self.architecture == "mlp" and not self.hidden:
            raise ConfigError("mlp needs at least one hidden layer")
        if any(int(h) < 1 for h in self.hidden):
            raise ConfigError("hidden sizes must be positive")
        if self.kernel_size < 1 or self.filters < 1:
            raise ConfigError("kernel_size and filters must be positive")

    def __str__(self):
        if self.architecture == "logistic":
            return "logistic"
        if self.architecture == "mlp":
            return "mlp:" + ",".join(str(h) for h in self.hidden)
        return f"conv1d:{self.kernel_size},{self.filters}"


def parse_model_spec(text) -> ModelSpec:
    """``logistic``, ``mlp:32,16`` or ``conv1d:<kernel>,<filters>``."""
    if isinstance(text, ModelSpec):
        return text
    arch, _, params = str(text).strip().lower().partition(":")
    try:
        values = tuple(int(p) for p in params.split(",")) if params else ()
    except ValueError as exc:
        raise ConfigError(f"cannot parse model spec {text!r}") from exc
    if arch == "logistic" and not values:
        return ModelSpec("logistic")
    if arch == "mlp" and values:
        return ModelSpec("mlp", hidden=values)
    if arch == "conv1d":
        if not values:
            return ModelSpec("conv1d")
        if len(values) == 2:
            return ModelSpec("conv1d", kernel_size=values[0], filters=values[1])
    raise ConfigError(f"invalid model spec {text!r}")


class Model:
    """Base class. Subclasses fill ``params`` and implement ``_forward``/``_backward``."""

    def __init__(self, input_shape):
        self.input_shape = tuple(input_shape)
        self.params: list[np.ndarray] = []

    def _batch(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape == self.input_shape:
            X = X[None]
        if X.shape[1:] != self.input_shape:
            raise DimensionError(f"input shape {X.shape[1:]} does not match model input {self.input_shape}")
        return X

    def pre_activation(self, X) -> np.ndarray:
        g, _ = self._forward(self._batch(X))
        return g

    def forward(self, X):
        """Probability of label 1, kept inside (0, 1)."""
        single = np.asarray(X).shape == self.input_shape
        p = np.clip(sigmoid(self.pre_activation(X)), PROB_EPS, 1.0 - PROB_EPS)
        return float(p[0]) if single else p

    def loss(self, X, y) -> float:
        """Mean cross-entropy over the batch (or the single sample)."""
        g = self.pre_activation(X)
        return float(np.mean(_logit_loss(g, np.asarray(y, dtype=np.float64).reshape(-1))))

    def loss_and_grad(self, X, y):
        X = self._batch(X)
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        g, cache = self._forward(X)
        loss = float(np.mean(_logit_loss(g, y)))
        dg = (sigmoid(g) - y) / X.shape[0]
        grads, _ = self._backward(dg, cache, need_input=False)
        return loss, grads

    def input_gradient(self, x) -> np.ndarray:
        """Gradient of the last pre-activation with respect to one input."""
        X = self._batch(x)
        if X.shape[0] != 1:
            raise DimensionError("input_gradient takes a single sample")
        _, cache = self._forward(X)
        _, dX = self._backward(np.ones(1), cache, need_input=True)
        return dX[0]

    def gradient(self, x, y):
        """(parameter gradients, input pre-activation gradient) for one sample."""
        _, grads = self.loss_and_grad(x, [y])
        return grads, self.input_gradient(x)

    def get_flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params])

    def set_flat(self, flat) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        i = 0
        for p in self.params:
            p[...] = flat[i : i + p.size].reshape(p.shape)
            i += p.size

    def copy(self):
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.params = [p.copy() for p in self.params]
        clone._bind()
        return clone

    def _bind(self):
        pass


class Logistic(Model):
    def __init__(self, input_shape, rng=None):
        super().__init__(input_shape)
        D = int(np.prod(self.input_shape))
        rng = make_rng(rng)
        self.params = [rng.normal(0.0, 1.0 / np.sqrt(D), size=D), np.zeros(1)]
        self._bind()

    def _bind(self):
        self.w, self.b = self.params

    def _forward(self, X):
        flat = X.reshape(X.shape[0], -1)
        return flat @ self.w + self.b[0], (X.shape, flat)

    def _backward(self, dg, cache, need_input):
        shape, flat = cache
        grads = [flat.T @ dg, np.array([dg.sum()])]
        dX = np.outer(dg, self.w).reshape(shape) if need_input else None
        return grads, dX


class MLP(Model):
    def __init__(self, input_shape, hidden, rng=None):
        super().__init__(input_shape)
        rng = make_rng(rng)
        sizes = [int(np.prod(self.input_shape))] + [int(h) for h in hidden]
        self.params = []
        for a, b in zip(sizes[:-1], sizes[1:]):
            self.params += [rng.normal(0.0, np.sqrt(2.0 / a), size=(a, b)), np.zeros(b)]
        self.params += [rng.normal(0.0, 1.0 / np.sqrt(sizes[-1]), size=sizes[-1]), np.zeros(1)]

    def _forward(self, X):
        h = X.reshape(X.shape[0], -1)
        acts, pres = [h], []
        for W, b in zip(self.params[0:-2:2], self.params[1:-2:2]):
            z = h @ W + b
            h = np.maximum(z, 0.0)
            pres.append(z)
            acts.append(h)
        v, c = self.params[-2:]
        return h @ v + c[0], (X.shape, acts, pres)

    def _backward(self, dg, cache, need_input):
        shape, acts, pres = cache
        v = self.params[-2]
        grads = [None] * len(self.params)
        grads[-2] = acts[-1].T @ dg
        grads[-1] = np.array([dg.sum()])
        dh = np.outer(dg, v)
        n_layers = len(pres)
        for k in reversed(range(n_layers)):
            dz = dh * (pres[k] > 0)
            W = self.params[2 * k]
            grads[2 * k] = acts[k].T @ dz
            grads[2 * k + 1] = dz.sum(axis=0)
            dh = dz @ W.T
        dX = dh.reshape(shape) if need_input else None
        return grads, dX


class Conv1D(Model):
    """conv (valid, stride 1) -> ReLU -> global average pool -> dense -> sigmoid."""

    def __init__(self, input_shape, kernel_size=3, filters=8, rng=None):
        super().__init__(input_shape)
        T = self.input_shape[0]
        C = self.input_shape[1] if len(self.input_shape) > 1 else 1
        if kernel_size > T:
            raise ConfigError(f"kernel_size {kernel_size} exceeds series length {T}")
        rng = make_rng(rng)
        fan_in = C * kernel_size
        self.k = kernel_size
        self.params = [
            rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(filters, C, kernel_size)),
            np.zeros(filters),
            rng.normal(0.0, 1.0 / np.sqrt(filters), size=filters),
            np.zeros(1),
        ]
        self._bind()

    def _bind(self):
        self.K, self.bk, self.v, self.c = self.params

    def _forward(self, X):
        n = X.shape[0]
        X3 = X.reshape(n, X.shape[1], -1)
        F, C, k = self.K.shape
        L = X3.shape[1] - k + 1
        # windows[n, l, c, j] = X3[n, l + j, c]
        win = np.lib.stride_tricks.sliding_window_view(X3, k, axis=1)
        cols = win.reshape(n * L, C * k)
        z = (cols @ self.K.reshape(F, C * k).T).reshape(n, L, F) + self.bk
        a = np.maximum(z, 0.0)
        h = a.mean(axis=1)
        return h @ self.v + self.c[0], (X.shape, X3.shape, cols, z, h)

    def _backward(self, dg, cache, need_input):
        shape, shape3, cols, z, h = cache
        n, T, C = shape3
        F, _, k = self.K.shape
        L = T - k + 1
        dh = np.outer(dg, self.v)
        dz = (dh[:, None, :] / L) * (z > 0)
        dz2 = dz.reshape(n * L, F)
        grads = [
            (dz2.T @ cols).reshape(F, C, k),
            dz2.sum(axis=0),
            h.T @ dg,
            np.array([dg.sum()]),
        ]
        dX = None
        if need_input:
            dwin = (dz2 @ self.K.reshape(F, C * k)).reshape(n, L, C, k)
            dX3 = np.zeros(shape3)
            for j in range(k):
                dX3[:, j : j + L, :] += dwin[:, :, :, j]
            dX = dX3.reshape(shape)
        return grads, dX


def build_model(spec, input_shape, rng=None) -> Model:
    spec = parse_model_spec(spec)
    if spec.architecture == "logistic":
        return Logistic(input_shape, rng)
    if spec.architecture == "mlp":
        return MLP(input_shape, spec.hidden, rng)
    return Conv1D(input_shape, spec.kernel_size, spec.filters, rng)
