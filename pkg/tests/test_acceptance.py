"""Acceptance criteria, each run at its stated size, tolerance and time budget.

A summary line per criterion is printed at the end of the session by the
hook in ``conftest.py``.
"""

import subprocess
import sys
import time
import zlib

import numpy as np
import pytest

from oracles import (
    central_difference_grads,
    fd_first,
    fd_second,
    gradient_check_error,
    randomize_params,
)
from rimaug import (
    augment_closed_form,
    augment_recursive,
    closed_form_coefficients,
    rim_batch,
)
from rimaug.bounds import bound_report, series_extrema
from rimaug.learner import build_model, variance_experiment
from rimaug.learner.experiments import synthetic_experiment
from rimaug.structure import (
    acceleration_matrices_at_zero,
    empirical_loss_gap,
    partial_derivative,
    velocity_matrix_at_zero,
)

criterion = pytest.mark.criterion


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False

    def check(self):
        assert self.elapsed < self.seconds, f"took {self.elapsed:.2f} s, budget {self.seconds} s"


@criterion(1, "closed-form equivalence")
def test_closed_form_equivalence(record_property):
    rng = np.random.default_rng(101)
    worst = 0.0
    with Budget(1.0) as b:
        for _ in range(1000):
            d = int(rng.integers(1, 65))
            x = rng.uniform(-10, 10, d + 1)
            lam = rng.random(d)
            rec = augment_recursive(x, lam).features
            cf = augment_closed_form(x, lam).features
            worst = max(worst, float(np.max(np.abs(rec - cf))))
    record_property("detail", f"max |diff| = {worst:.3g}")
    assert worst <= 1e-10
    b.check()


@criterion(2, "coefficient convexity")
def test_convexity(record_property):
    rng = np.random.default_rng(102)
    worst_sum, min_coef = 0.0, np.inf
    with Budget(1.0) as b:
        for _ in range(10000):
            d = int(rng.integers(1, 65))
            lam = rng.random(d)
            n = int(rng.integers(0, d + 1))
            c = closed_form_coefficients(lam, n)
            min_coef = min(min_coef, float(c.min()))
            worst_sum = max(worst_sum, abs(float(c.sum()) - 1.0))
    record_property("detail", f"min coefficient = {min_coef:.3g}, max |sum - 1| = {worst_sum:.3g}")
    assert min_coef >= 0.0
    assert worst_sum <= 1e-12
    b.check()


@criterion(3, "identity and prefix containment")
def test_identity_and_containment(record_property):
    rng = np.random.default_rng(103)
    with Budget(1.0) as b:
        for _ in range(100):
            d = int(rng.integers(0, 65))
            x = rng.uniform(-10, 10, d + 1)
            assert np.array_equal(augment_recursive(x, np.zeros(d)).features, x)
        violations = 0
        for d in (1, 2, 7, 16, 32, 64):
            X = rng.uniform(-10, 10, (10000 // 6 + 1, d + 1))
            out = rim_batch(X, rng.random((X.shape[0], d)))
            lo = np.minimum.accumulate(X, axis=1)
            hi = np.maximum.accumulate(X, axis=1)
            violations += int(np.count_nonzero((out < lo) | (out > hi)))
    record_property("detail", f"containment violations = {violations}")
    assert violations == 0
    b.check()


def _bound_series():
    rng = np.random.default_rng(104)
    return rng.uniform(-1, 1, (50, 33))


@criterion(4, "mean-deviation bound, Uniform, d = 32")
def test_mean_deviation_bound(record_property):
    series = _bound_series()
    streams = np.random.SeedSequence(204).spawn(len(series))
    passed = 0
    with Budget(30.0) as b:
        for x, ss in zip(series, streams):
            rep = bound_report(x, "uniform", 100000, np.random.default_rng(ss))
            ext = series_extrema(x)
            bound = min(1.5 * ext.m, ext.m_prime, 16 * ext.m_prime)
            assert rep.bound_mean_dev == pytest.approx(bound, rel=1e-15)
            passed += bool(np.all(rep.mc_mean_dev <= bound + 3 * rep.mc_mean_dev_se))
    record_property("detail", f"pass rate {passed}/50")
    assert passed == 50
    b.check()


@criterion(5, "sample-distance bound, Uniform and Beta(2,5)")
def test_sample_distance_bound(record_property):
    series = _bound_series()
    counts = {}
    with Budget(30.0) as b:
        for spec, e, seed in (("uniform", 0.5, 205), ("beta:2,5", 2 / 7, 305)):
            streams = np.random.SeedSequence(seed).spawn(len(series))
            ok = 0
            for x, ss in zip(series, streams):
                rep = bound_report(x, spec, 100000, np.random.default_rng(ss))
                m = float(np.max(np.abs(x)))
                assert rep.bound_sample_distance == pytest.approx(2 * m * 32 * e, rel=1e-15)
                ok += rep.mc_sample_distance <= 2 * m * 32 * e + 3 * rep.mc_sample_distance_se
            counts[spec] = ok
    record_property("detail", ", ".join(f"{k}: {v}/50" for k, v in counts.items()))
    assert all(v == 50 for v in counts.values())
    b.check()


@criterion(6, "derivative structure against finite differences")
def test_derivative_structure(record_property):
    rng = np.random.default_rng(106)
    bad = 0

    def close(a, n):
        return abs(a - n) <= max(1e-8, 1e-4 * abs(n))

    with Budget(10.0) as b:
        for _ in range(100):
            d = int(rng.integers(2, 9))
            x = rng.uniform(-5, 5, d + 1)
            lam = rng.random(d)
            zero = np.zeros(d)
            for i in range(1, d + 1):
                for j in range(1, d + 1):
                    bad += not close(partial_derivative(x, lam, i, j), fd_first(x, lam, i, j))
            A = velocity_matrix_at_zero(x)
            B = acceleration_matrices_at_zero(x)
            expect_A = np.zeros((d + 1, d + 1))
            expect_A[np.arange(1, d + 1), np.arange(1, d + 1)] = x[:-1] - x[1:]
            assert np.array_equal(A, expect_A)
            for j in range(1, d + 1):
                for l in range(1, d + 1):
                    bad += not close(A[j, l], fd_first(x, zero, l, j))
                    for i in range(1, d + 1):
                        bad += not close(B[i - 1][j, l], fd_second(x, zero, i, j, l))
    record_property("detail", f"mismatches = {bad}")
    assert bad == 0
    b.check()


def _loss_gap_instances():
    rng = np.random.default_rng(107)
    out = []
    for _ in range(50):
        d = int(rng.integers(4, 33))
        x = rng.uniform(-1, 1, d + 1)
        lam = rng.random(d)
        model = build_model("logistic", (d + 1,), rng)
        out.append((x, int(rng.integers(0, 2)), lam, model))
    return out


@criterion(7, "first-order loss-gap behaviour")
def test_first_order_loss_gap(record_property):
    from rimaug import TimeSeriesSample

    ratio_fail, bound_fail = 0, 0
    fine_fail = 0
    with Budget(10.0) as b:
        for x, y, lam, model in _loss_gap_instances():
            s = TimeSeriesSample(x, y)
            g1 = empirical_loss_gap(s, lam, model, 0.1)
            g2 = empirical_loss_gap(s, lam, model, 0.01)
            r1, r2 = g1.gap / 0.1, g2.gap / 0.01
            ratio_fail += not abs(r1 - r2) <= 0.1 * r2
            bound_fail += not g2.gap <= g2.bound * 0.01 * 1.1
            # information only: the same ratio test one decade further in
            g3 = empirical_loss_gap(s, lam, model, 0.001)
            fine_fail += not abs(r2 - g3.gap / 0.001) <= 0.1 * (g3.gap / 0.001)
    record_property(
        "detail",
        f"ratio within 10%: {50 - ratio_fail}/50, bound: {50 - bound_fail}/50; "
        f"info, scales (0.01, 0.001): {50 - fine_fail}/50",
    )
    b.check()
    assert bound_fail == 0
    assert ratio_fail == 0


@criterion(8, "variance reduction of the augmented estimator")
def test_variance_reduction(record_property):
    with Budget(60.0) as b:
        rep = variance_experiment(N=50, replications=2000, spec="uniform", mc_lambda=64, dim=8, seed=108)
        ident = variance_experiment(N=50, replications=2000, spec="constant:0", mc_lambda=64, dim=8, seed=108)
    record_property(
        "detail", f"RE = {rep.relative_efficiency:.4f} +- {rep.se_relative_efficiency:.4f}, "
                  f"identity RE = {ident.relative_efficiency!r}"
    )
    assert rep.relative_efficiency >= 1 - 0.02
    assert ident.relative_efficiency == 1.0
    b.check()


@criterion(9, "backprop gradient check")
def test_gradient_check(record_property):
    rng = np.random.default_rng(109)
    archs = ["logistic", "mlp:8,4", "conv1d:3,4"]
    worst = 0.0
    with Budget(10.0) as b:
        for k in range(100):
            arch = archs[k % 3]
            T = int(rng.integers(5, 16))
            shape = (T, 2) if arch.startswith("conv") and k % 2 else (T,)
            model = randomize_params(build_model(arch, shape, rng), rng)
            x = rng.normal(size=shape)
            y = int(rng.integers(0, 2))
            _, grads = model.loss_and_grad(x, [y])
            analytic = np.concatenate([g.ravel() for g in grads])
            err = gradient_check_error(analytic, central_difference_grads(model, x, [y]))
            worst = max(worst, err)
    record_property("detail", f"max relative error = {worst:.3g}")
    assert worst <= 1e-4
    b.check()


_EXPERIMENTS = {}


def _experiment(task, spec):
    key = (task, spec)
    if key not in _EXPERIMENTS:
        t = time.perf_counter()
        rep = synthetic_experiment(task, spec, seed=1000 + task)
        _EXPERIMENTS[key] = (rep, time.perf_counter() - t)
    return _EXPERIMENTS[key]


@criterion(10, "synthetic tasks: augmented accuracy and spread")
def test_synthetic_experiment(record_property):
    r1, t1 = _experiment(1, "uniform")
    r2, t2 = _experiment(2, "uniform")
    parts = []
    for name, r in (("task1", r1), ("task2", r2)):
        a, p = r.augmented, r.plain
        parts.append(f"{name} acc {a.final_accuracy_mean:.3f}+-{a.final_accuracy_std:.3f} vs "
                     f"{p.final_accuracy_mean:.3f}+-{p.final_accuracy_std:.3f}")
    record_property("detail", "; ".join(parts))
    for r in (r1, r2):
        assert r.augmented.final_accuracy_mean >= r.plain.final_accuracy_mean
    assert any(r.augmented.final_accuracy_std <= r.plain.final_accuracy_std for r in (r1, r2))
    assert t1 + t2 < 300


@criterion(11, "Beta ablations on task 1")
def test_beta_ablations(record_property):
    parts, total = [], 0.0
    deltas = []
    for spec in ("beta:2,2", "beta:0.5,0.5", "beta:2,5"):
        r, t = _experiment(1, spec)
        total += t
        deltas.append(r.final_accuracy_delta)
        parts.append(f"{spec} {r.augmented.final_accuracy_mean:.3f} vs {r.plain.final_accuracy_mean:.3f}")
    record_property("detail", "; ".join(parts))
    assert all(dl >= 0 for dl in deltas)
    assert total < 600


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "rimaug.cli", *args], cwd=cwd, capture_output=True, check=False)


@criterion(12, "CLI determinism")
def test_cli_determinism(tmp_path, record_property):
    commands = [
        ["generate", "--task", "2", "--n", "4", "--length", "16"],
        ["augment", "--in", "train.csv", "--k", "3", "--dist", "beta:2,5"],
        ["bounds", "--in", "train.csv", "--trials", "2000", "--format", "json"],
        ["derivs", "--in", "train.csv", "--fd-check", "--limit", "2"],
        ["train", "--in", "train.csv", "--test", "test.csv", "--epochs", "2", "--seeds", "2",
         "--aug", "uniform", "--curves", "{curves}"],
        ["compare", "--in", "train.csv", "--test", "test.csv", "--epochs", "2", "--seeds", "2",
         "--model", "mlp:4", "--format", "json", "--curves", "{curves}"],
        ["variance", "--reps", "500", "--n", "10", "--mc-lambda", "4"],
    ]
    assert _cli(["generate", "--task", "2", "--n", "4", "--length", "16", "--seed", "5", "--out", "train.csv"],
                tmp_path).returncode == 0
    assert _cli(["generate", "--task", "2", "--n", "6", "--length", "16", "--seed", "6", "--out", "test.csv"],
                tmp_path).returncode == 0
    for k, cmd in enumerate(commands):
        outputs = []
        for rep in range(2):
            curves = f"curves_{k}_{rep}.csv"
            args = [a.replace("{curves}", curves) for a in cmd] + ["--seed", "42", "--out", f"out_{k}_{rep}.txt"]
            proc = _cli(args, tmp_path)
            assert proc.returncode == 0, proc.stderr.decode()
            files = [(tmp_path / f"out_{k}_{rep}.txt").read_bytes(), proc.stdout, proc.stderr]
            if "{curves}" in cmd:
                files.append((tmp_path / curves).read_bytes())
            outputs.append(files)
        assert outputs[0] == outputs[1], f"command {cmd[0]} is not deterministic"
        assert zlib.crc32(outputs[0][0]) != 0
    record_property("detail", f"{len(commands)} subcommands byte-identical across repeated runs")
