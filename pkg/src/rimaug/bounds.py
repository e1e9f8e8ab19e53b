"""Deviation bounds for recursive interpolation and their Monte Carlo checks.

For a scalar series with ``m = max |x_i|``, ``m' = max |x_i - x_{i-1}|`` and
``e = E[lam]``:

* per-index mean deviation ``|E[x'_n - x_n]| <= min(3 e m, e/(1-e) m', N e m')``
* per-index absolute deviation ``E|x'_n - x_n| <= 2 e m``
* sample distance ``E[sum_i |x'_i - x_i|] <= 2 m d e``

The Monte Carlo estimators accept a bound when ``estimate <= bound + 3 SE``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import TimeSeriesSample, _as_sample, rim_batch
from .distributions import distribution_mean, make_rng, parse_spec, sample_lambda, spawn
from .errors import ConfigError, DimensionError, DomainError, InputError

MIN_TRIALS = 1000
SE_SLACK = 3.0
SINGULAR_EPS = 1e-12
CHUNK = 16384


@dataclass(frozen=True)
class SeriesExtrema:
    m: float
    m_prime: float


def _scalar_features(sample) -> np.ndarray:
    s = _as_sample(sample)
    if s.features.ndim != 1:
        raise DimensionError("bounds are defined for scalar-valued series")
    return s.features


def series_extrema(sample) -> SeriesExtrema:
    x = _scalar_features(sample)
    m = float(np.max(np.abs(x)))
    m_prime = float(np.max(np.abs(np.diff(x)))) if x.size > 1 else 0.0
    return SeriesExtrema(m, m_prime)


def mean_deviation_bound(extrema: SeriesExtrema, e: float, N: int) -> float:
    """``min(3 e m, e / (1 - e) m', N e m')``."""
    if not 0.0 <= e < 1.0:
        raise DomainError(f"distribution mean must lie in [0, 1), got {e}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    terms = [3.0 * e * extrema.m, N * e * extrema.m_prime]
    if 1.0 - e >= SINGULAR_EPS:
        terms.append(e / (1.0 - e) * extrema.m_prime)
    return float(min(terms))


def sample_distance_bound(m: float, d: int, e: float) -> float:
    return 2.0 * m * d * e


def absolute_deviation_bound(m: float, e: float) -> float:
    return 2.0 * e * m


@dataclass
class _Moments:
    """Running sums over Monte Carlo trials for one series."""

    trials: int = 0
    dev: np.ndarray = None
    dev_sq: np.ndarray = None
    absdev: np.ndarray = None
    absdev_sq: np.ndarray = None
    dist: float = 0.0
    dist_sq: float = 0.0
    norm_order_violations: int = 0

    def add(self, x, aug):
        diff = aug - x
        a = np.abs(diff)
        l1 = a.sum(axis=1)
        l2 = np.sqrt((diff * diff).sum(axis=1))
        if self.dev is None:
            self.dev = np.zeros(x.shape[0])
            self.dev_sq = np.zeros(x.shape[0])
            self.absdev = np.zeros(x.shape[0])
            self.absdev_sq = np.zeros(x.shape[0])
        self.trials += diff.shape[0]
        self.dev += diff.sum(axis=0)
        self.dev_sq += (diff * diff).sum(axis=0)
        self.absdev += a.sum(axis=0)
        self.absdev_sq += (a * a).sum(axis=0)
        self.dist += float(l1.sum())
        self.dist_sq += float((l1 * l1).sum())
        self.norm_order_violations += int(np.count_nonzero(l2 > l1))

    @staticmethod
    def _mean_se(total, total_sq, n):
        mean = total / n
        var = np.maximum(total_sq / n - mean * mean, 0.0) * n / (n - 1)
        return mean, np.sqrt(var / n)


def _run_trials(x, spec, trials, rng) -> _Moments:
    if trials < MIN_TRIALS:
        raise ConfigError(f"need at least {MIN_TRIALS} trials, got {trials}")
    spec = parse_spec(spec)
    rng = make_rng(rng)
    d = x.shape[0] - 1
    mom = _Moments()
    done = 0
    while done < trials:
        k = min(CHUNK, trials - done)
        lam = sample_lambda(spec, (k, d), rng)
        mom.add(x, rim_batch(x, lam, shared=True))
        done += k
    return mom


@dataclass(frozen=True)
class MeanDeviationEstimate:
    estimates: np.ndarray
    standard_errors: np.ndarray
    abs_estimates: np.ndarray
    abs_standard_errors: np.ndarray


def estimate_mean_deviation(sample, spec, trials: int, rng=None) -> MeanDeviationEstimate:
    """Per-index ``|mean_t (x'_n - x_n)|`` and ``mean_t |x'_n - x_n|`` with SEs."""
    x = _scalar_features(sample)
    mom = _run_trials(x, spec, trials, rng)
    mean, se = _Moments._mean_se(mom.dev, mom.dev_sq, mom.trials)
    amean, ase = _Moments._mean_se(mom.absdev, mom.absdev_sq, mom.trials)
    return MeanDeviationEstimate(np.abs(mean), se, amean, ase)


def estimate_sample_distance(sample, spec, trials: int, rng=None) -> tuple[float, float]:
    """Monte Carlo ``E[sum_i |x'_i - x_i|]`` and its standard error."""
    x = _scalar_features(sample)
    mom = _run_trials(x, spec, trials, rng)
    mean, se = _Moments._mean_se(mom.dist, mom.dist_sq, mom.trials)
    return float(mean), float(se)


@dataclass
class DeviationBoundReport:
    index: int
    extrema: SeriesExtrema
    e: float
    N: int
    d: int
    trials: int
    bound_mean_dev: float
    bound_sample_distance: float
    bound_abs_dev: float
    mc_mean_dev: np.ndarray = field(repr=False)
    mc_mean_dev_se: np.ndarray = field(repr=False)
    mc_abs_dev: np.ndarray = field(repr=False)
    mc_abs_dev_se: np.ndarray = field(repr=False)
    mc_sample_distance: float = 0.0
    mc_sample_distance_se: float = 0.0
    norm_order_violations: int = 0

    @property
    def pass_mean_dev(self) -> bool:
        return bool(np.all(self.mc_mean_dev <= self.bound_mean_dev + SE_SLACK * self.mc_mean_dev_se))

    @property
    def pass_abs_dev(self) -> bool:
        return bool(np.all(self.mc_abs_dev <= self.bound_abs_dev + SE_SLACK * self.mc_abs_dev_se))

    @property
    def pass_sample_distance(self) -> bool:
        return self.mc_sample_distance <= self.bound_sample_distance + SE_SLACK * self.mc_sample_distance_se

    @property
    def passed(self) -> bool:
        return (
            self.pass_mean_dev
            and self.pass_abs_dev
            and self.pass_sample_distance
            and self.norm_order_violations == 0
        )

    def to_record(self) -> dict:
        worst = int(np.argmax(self.mc_mean_dev - self.mc_mean_dev_se * SE_SLACK))
        return {
            "index": self.index,
            "m": self.extrema.m,
            "m_prime": self.extrema.m_prime,
            "e": self.e,
            "N": self.N,
            "trials": self.trials,
            "bound_mean_dev": self.bound_mean_dev,
            "max_mc_mean_dev": float(self.mc_mean_dev.max()),
            "worst_index": worst,
            "worst_mc_mean_dev": float(self.mc_mean_dev[worst]),
            "worst_mc_mean_dev_se": float(self.mc_mean_dev_se[worst]),
            "bound_abs_dev": self.bound_abs_dev,
            "max_mc_abs_dev": float(self.mc_abs_dev.max()),
            "bound_sample_distance": self.bound_sample_distance,
            "mc_sample_distance": self.mc_sample_distance,
            "mc_sample_distance_se": self.mc_sample_distance_se,
            "norm_order_violations": self.norm_order_violations,
            "pass_mean_dev": self.pass_mean_dev,
            "pass_abs_dev": self.pass_abs_dev,
            "pass_sample_distance": self.pass_sample_distance,
            "passed": self.passed,
        }


def bound_report(sample, spec, trials: int, rng=None, index: int = 0) -> DeviationBoundReport:
    """Analytic bounds and all Monte Carlo estimates for one series, in one pass."""
    x = _scalar_features(sample)
    spec = parse_spec(spec)
    e = distribution_mean(spec)
    d = x.shape[0] - 1
    ext = series_extrema(x)
    mom = _run_trials(x, spec, trials, rng)
    mean, se = _Moments._mean_se(mom.dev, mom.dev_sq, mom.trials)
    amean, ase = _Moments._mean_se(mom.absdev, mom.absdev_sq, mom.trials)
    dist, dist_se = _Moments._mean_se(mom.dist, mom.dist_sq, mom.trials)
    return DeviationBoundReport(
        index=index,
        extrema=ext,
        e=e,
        N=max(d, 1),
        d=d,
        trials=mom.trials,
        bound_mean_dev=mean_deviation_bound(ext, e, max(d, 1)),
        bound_sample_distance=sample_distance_bound(ext.m, d, e),
        bound_abs_dev=absolute_deviation_bound(ext.m, e),
        mc_mean_dev=np.abs(mean),
        mc_mean_dev_se=se,
        mc_abs_dev=amean,
        mc_abs_dev_se=ase,
        mc_sample_distance=float(dist),
        mc_sample_distance_se=float(dist_se),
        norm_order_violations=mom.norm_order_violations,
    )


@dataclass
class BoundsVerification:
    reports: list

    @property
    def pass_rate(self) -> float:
        return sum(r.passed for r in self.reports) / len(self.reports)


def _iter_series(dataset):
    if hasattr(dataset, "samples"):
        return [s.features for s in dataset.samples]
    if isinstance(dataset, TimeSeriesSample):
        return [dataset.features]
    if isinstance(dataset, np.ndarray) and dataset.ndim == 2:
        return list(dataset)
    return [_as_sample(s).features for s in dataset]


def verify_bounds(dataset, spec, trials: int, rng=None) -> BoundsVerification:
    """Run :func:`bound_report` on every series with its own substream."""
    series = _iter_series(dataset)
    if not series:
        raise InputError("dataset is empty")
    streams = spawn(rng, len(series))
    reports = [bound_report(x, spec, trials, g, index=i) for i, (x, g) in enumerate(zip(series, streams))]
    return BoundsVerification(reports)
