"""Distributions for the interpolation coefficients, supported on [0, 1).

Specs are written as strings in configuration: ``uniform``, ``beta:2,5``,
``constant:0.0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

KINDS = ("uniform", "beta", "constant")


@dataclass(frozen=True)
class LambdaDistribution:
    kind: str = "uniform"
    alpha: float = 1.0
    beta: float = 1.0
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown distribution kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "beta":
            if not (np.isfinite(self.alpha) and np.isfinite(self.beta) and self.alpha > 0 and self.beta > 0):
                raise ConfigError(f"Beta shape parameters must be positive, got ({self.alpha}, {self.beta})")
        if self.kind == "constant" and not (0.0 <= self.value < 1.0):
            raise ConfigError(f"constant value must lie in [0, 1), got {self.value}")

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def beta_dist(cls, alpha, beta):
        return cls("beta", alpha=float(alpha), beta=float(beta))

    @classmethod
    def constant(cls, value):
        return cls("constant", value=float(value))

    @property
    def mean(self) -> float:
        return distribution_mean(self)

    @property
    def second_moment(self) -> float:
        """E[lam^2]."""
        if self.kind == "uniform":
            return 1.0 / 3.0
        if self.kind == "beta":
            a, b = self.alpha, self.beta
            return a * (a + 1) / ((a + b) * (a + b + 1))
        return self.value**2

    @property
    def is_identity(self) -> bool:
        return self.kind == "constant" and self.value == 0.0

    def __str__(self):
        if self.kind == "uniform":
            return "uniform"
        if self.kind == "beta":
            return f"beta:{self.alpha!r},{self.beta!r}"
        return f"constant:{self.value!r}"


def parse_spec(text) -> LambdaDistribution:
    """Parse ``uniform``, ``beta:a,b`` or ``constant:c``."""
    if isinstance(text, LambdaDistribution):
        return text
    kind, _, params = str(text).strip().lower().partition(":")
    try:
        values = [float(p) for p in params.split(",")] if params else []
    except ValueError as exc:
        raise ConfigError(f"cannot parse distribution parameters in {text!r}") from exc
    if kind == "uniform" and not values:
        return LambdaDistribution.uniform()
    if kind == "beta" and len(values) == 2:
        return LambdaDistribution.beta_dist(*values)
    if kind == "constant" and len(values) == 1:
        return LambdaDistribution.constant(values[0])
    raise ConfigError(f"invalid distribution spec {text!r}")


def distribution_mean(spec: LambdaDistribution) -> float:
    spec = parse_spec(spec)
    if spec.kind == "uniform":
        return 0.5
    if spec.kind == "beta":
        return spec.alpha / (spec.alpha + spec.beta)
    return spec.value


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def make_rng(seed=None) -> np.random.Generator:
    """PCG64 generator from an int, a SeedSequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn(seed, n: int) -> list[np.random.Generator]:
    """``n`` independent, reproducible child generators.

    Children of a SeedSequence are derived by its spawn key, so the i-th child
    is the same regardless of how many siblings are requested.
    """
    if isinstance(seed, np.random.Generator):
        return [np.random.Generator(bg) for bg in seed.bit_generator.spawn(n)]
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.PCG64(c)) for c in ss.spawn(n)]


def sample_lambda(spec, d, rng) -> np.ndarray:
    """Draw ``d`` (or an array of shape ``d``) iid coefficients in [0, 1)."""
    spec = parse_spec(spec)
    shape = (d,) if np.isscalar(d) else tuple(d)
    if any(int(s) < 0 for s in shape):
        raise ConfigError(f"negative size {shape}")
    rng = make_rng(rng)
    if spec.kind == "constant":
        return np.full(shape, spec.value)
    if spec.kind == "uniform":
        return rng.random(shape)
    out = rng.beta(spec.alpha, spec.beta, size=shape)
    # maintain the open upper end of the support
    bad = out >= 1.0
    while np.any(bad):
        out[bad] = rng.beta(spec.alpha, spec.beta, size=int(bad.sum()))
        bad = out >= 1.0
    return out
