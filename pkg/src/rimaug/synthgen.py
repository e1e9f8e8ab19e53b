"""Synthetic two-class datasets from one-dimensional ODEs.

Task 1 (exponential)::

    class 0: dy/dt = -0.5 y^2 + exp(-y)
    class 1: dy/dt = -0.3 y^2 + 1.5 exp(-y)

Task 2 (trigonometric)::

    class 0: dy/dt = 0.6 + 0.5 sin(y)
    class 1: dy/dt = 1 + cos(y)

Trajectories are integrated with fixed-step RK4 from a random initial value,
then observation noise is added pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .distributions import as_seed_sequence, make_rng
from .errors import ConfigError, IntegrationError

RHS = {
    (1, 0): lambda y: -0.5 * y**2 + np.exp(-y),
    (1, 1): lambda y: -0.3 * y**2 + 1.5 * np.exp(-y),
    (2, 0): lambda y: 0.6 + 0.5 * np.sin(y),
    (2, 1): lambda y: 1.0 + np.cos(y),
    (0, 0): lambda y: np.zeros_like(y),
}


@dataclass(frozen=True)
class OdeSpec:
    task: int = 1
    label: int = 0
    y0_range: tuple = (0.0, 1.0)
    step: float = 0.1
    length: int = 100
    noise_sigma: float = 0.05

    def __post_init__(self):
        if (self.task, self.label) not in RHS:
            raise ConfigError(f"no ODE for task {self.task}, class {self.label}")
        if not self.step > 0:
            raise ConfigError("step must be positive")
        if self.length < 2:
            raise ConfigError("length must be at least 2")
        if not self.noise_sigma >= 0:
            raise ConfigError("noise_sigma must be non-negative")
        lo, hi = self.y0_range
        if not lo <= hi:
            raise ConfigError(f"empty y0 range {self.y0_range}")

    @property
    def rhs(self):
        return RHS[(self.task, self.label)]


def rk4(f, y0, step: float, length: int) -> np.ndarray:
    """Fixed-step classic RK4 for autonomous ``dy/dt = f(y)``.

    ``y0`` may be an array of independent initial values; the result has
    shape ``y0.shape + (length,)`` and includes the initial point.
    """
    y = np.array(y0, dtype=np.float64)
    out = np.empty(y.shape + (length,))
    out[..., 0] = y
    h = step
    for t in range(1, length):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at step {t}")
        out[..., t] = y
    return out


def integrate_ode(spec: OdeSpec, y0, rng=None) -> np.ndarray:
    """Noisy RK4 trajectory(ies) of ``spec`` starting at ``y0``."""
    lo, hi = spec.y0_range
    y0 = np.asarray(y0, dtype=np.float64)
    if np.any(y0 < lo) or np.any(y0 > hi):
        raise ConfigError(f"y0 outside {spec.y0_range}")
    traj = rk4(spec.rhs, y0, spec.step, spec.length)
    if spec.noise_sigma > 0:
        traj = traj + spec.noise_sigma * make_rng(rng).standard_normal(traj.shape)
    return traj


def generate_dataset(task: int, n_per_class: int, seed=0, **overrides):
    """Balanced two-class dataset; class ``c`` gets label ``c``.

    ``overrides`` are forwarded to :class:`OdeSpec` (``length``, ``step``,
    ``noise_sigma``, ``y0_range``).
    """
    from .dataio import Dataset

    if int(n_per_class) != n_per_class or n_per_class < 1:
        raise ConfigError(f"n_per_class must be a positive integer, got {n_per_class}")
    if task not in (1, 2):
        raise ConfigError(f"task must be 1 or 2, got {task}")
    root = as_seed_sequence(seed)
    X, y = [], []
    for label, ss in zip((0, 1), root.spawn(2)):
        spec = replace(OdeSpec(task=task, label=label), **overrides)
        init_rng, noise_rng = (make_rng(c) for c in ss.spawn(2))
        y0 = init_rng.uniform(*spec.y0_range, size=n_per_class)
        X.append(integrate_ode(spec, y0, noise_rng))
        y.append(np.full(n_per_class, label))
    return Dataset(np.concatenate(X), np.concatenate(y), labels=(0, 1))
