"""Command-line driver.

Exit codes: 0 success, 1 input/configuration error (including bad flags),
2 verification failure.

Seed splitting: every stage draws from
``SeedSequence(--seed, spawn_key=(stage,))`` with stages data=0, lambda=1,
Monte Carlo=2, experiment=3. Training run ``i`` of ``--seeds n`` uses run
seed ``(--seed, i)``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import RimError

STAGE_DATA, STAGE_LAMBDA, STAGE_MC, STAGE_EXPERIMENT = range(4)


def stage_seed(seed: int, stage: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(stage,))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (np.integer,)):
        return str(int(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


class Emitter:
    """Writes records as ``key=value`` lines or newline-delimited JSON."""

    def __init__(self, fmt, out):
        self.fmt = fmt
        self.out = out

    def record(self, kind, rec):
        rec = {"record": kind, **rec}
        if self.fmt == "json":
            self.out.write(json.dumps(_jsonable(rec)) + "\n")
        else:
            self.out.write(" ".join(f"{k}={_fmt(v)}" for k, v in rec.items()) + "\n")


def _global_flags(suppress=False):
    # the subcommand copy suppresses defaults so it cannot overwrite a value
    # given before the subcommand name
    def default(v):
        return argparse.SUPPRESS if suppress else v

    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=default(0), help="master seed (default 0)")
    p.add_argument("--out", default=default(None), help="output path (default stdout)")
    p.add_argument("--format", choices=("text", "json"), default=default("text"))
    return p


def _train_flags(p, aug_required=False):
    p.add_argument("--in", dest="inp", required=True, help="training dataset file")
    p.add_argument("--test", required=True, help="test dataset file")
    p.add_argument("--model", default="conv1d:3,8", help="logistic | mlp:h1,h2 | conv1d:kernel,filters")
    p.add_argument("--aug", default="uniform" if aug_required else None, help="lambda distribution for augmentation")
    p.add_argument("--k", type=int, default=4, help="augmented copies per sample")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.add_argument("--seeds", type=int, default=10, help="number of repeated runs")
    p.add_argument("--redraw", action="store_true", help="redraw augmentations every epoch")
    p.add_argument("--curves", default=None, help="write per-epoch curves as CSV to this path")


def build_parser():
    parser = _Parser(prog="rimaug", description="Recursive interpolation augmentation toolkit.",
                     parents=[_global_flags()])
    g = _global_flags(suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", parents=[g], help="synthetic ODE dataset")
    p.add_argument("--task", type=int, choices=(1, 2), required=True)
    p.add_argument("--n", type=int, required=True, help="series per class")
    p.add_argument("--length", type=int, default=100)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--y0-min", type=float, default=0.0)
    p.add_argument("--y0-max", type=float, default=1.0)

    p = sub.add_parser("augment", parents=[g], help="augment a dataset file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--k", type=int, default=1)

    p = sub.add_parser("bounds", parents=[g], help="Monte Carlo check of the deviation bounds")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--threshold", type=float, default=1.0, help="minimum pass rate (default 1.0)")

    p = sub.add_parser("derivs", parents=[g], help="velocity/acceleration matrices at lambda = 0")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--fd-check", action="store_true", help="compare against finite differences")
    p.add_argument("--limit", type=int, default=None, help="only the first LIMIT samples")

    p = sub.add_parser("train", parents=[g], help="train a classifier")
    _train_flags(p)

    p = sub.add_parser("compare", parents=[g], help="augmented versus plain training")
    _train_flags(p, aug_required=True)

    p = sub.add_parser("variance", parents=[g], help="estimator variance with and without augmentation")
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--mc-lambda", type=int, default=64)
    return parser


def _cmd_generate(args, out, em):
    from .dataio import dumps
    from .synthgen import generate_dataset

    ds = generate_dataset(args.task, args.n, stage_seed(args.seed, STAGE_DATA), length=args.length,
                          step=args.step, noise_sigma=args.noise, y0_range=(args.y0_min, args.y0_max))
    out.write(dumps(ds))
    return 0


def _cmd_augment(args, out, em):
    from .dataio import augment_dataset, dumps, read_dataset

    ds = read_dataset(args.inp)
    out.write(dumps(augment_dataset(ds, args.dist, args.k, stage_seed(args.seed, STAGE_LAMBDA))))
    return 0


def _cmd_bounds(args, out, em):
    from .bounds import verify_bounds
    from .dataio import read_dataset

    ds = read_dataset(args.inp)
    res = verify_bounds(ds, args.dist, args.trials, stage_seed(args.seed, STAGE_MC))
    for r in res.reports:
        em.record("sample", r.to_record())
    em.record("summary", {"samples": len(res.reports), "dist": args.dist, "pass_rate": res.pass_rate,
                          "threshold": args.threshold})
    return 0 if res.pass_rate >= args.threshold else 2


def _cmd_derivs(args, out, em):
    from .dataio import read_dataset
    from .structure import compare_with_oracle, structure_matrices

    ds = read_dataset(args.inp)
    n = len(ds) if args.limit is None else min(args.limit, len(ds))
    failures = 0
    for idx in range(n):
        s = ds[idx]
        mats = structure_matrices(s)
        rec = {"index": idx, "d": mats.d}
        if args.fd_check:
            chk = compare_with_oracle(s)
            failures += not chk["passed"]
            rec.update(fd_max_abs_error=chk["max_abs_error"], fd_passed=chk["passed"])
        if em.fmt == "json":
            rec.update(A=mats.A.tolist(), B=[b.tolist() for b in mats.B])
            em.record("sample", rec)
        else:
            em.record("sample", rec)
            out.write(mats.to_text())
    em.record("summary", {"samples": n, "fd_checked": bool(args.fd_check), "fd_failures": failures})
    return 2 if failures else 0


def _train_setup(args):
    from .dataio import read_dataset
    from .learner import TrainConfig

    train_ds = read_dataset(args.inp)
    test_ds = read_dataset(args.test)
    config = TrainConfig(
        epochs=args.epochs, batch_size=args.batch, learning_rate=args.lr, optimizer=args.optimizer,
        augmentation=args.aug, factor=args.k, seeds=tuple((args.seed, i) for i in range(args.seeds)),
        redraw_each_epoch=args.redraw,
    )
    return train_ds, test_ds, config


def _write_curves(path, rows):
    from .learner.training import curves_csv

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(curves_csv(rows))


def _cmd_train(args, out, em):
    from .learner import train

    train_ds, test_ds, config = _train_setup(args)
    rep = train(train_ds, test_ds, args.model, config)
    for row in rep.curve_rows():
        em.record("epoch", row)
    em.record("summary", {"model": args.model, "aug": args.aug or "none", **rep.summary()})
    if args.curves:
        _write_curves(args.curves, rep.curve_rows())
    return 0


def _cmd_compare(args, out, em):
    from .learner import compare_experiment

    train_ds, test_ds, config = _train_setup(args)
    rep = compare_experiment(train_ds, test_ds, args.model, config)
    for row in rep.curve_rows():
        em.record("epoch", row)
    for e, dlt in enumerate(rep.accuracy_delta):
        em.record("delta", {"epoch": e, "test_accuracy_delta": float(dlt)})
    s = rep.summary()
    em.record("summary", {"model": args.model, "aug": args.aug,
                          "augmented_final_accuracy_mean": s["augmented"]["final_test_accuracy_mean"],
                          "augmented_final_accuracy_std": s["augmented"]["final_test_accuracy_std"],
                          "plain_final_accuracy_mean": s["plain"]["final_test_accuracy_mean"],
                          "plain_final_accuracy_std": s["plain"]["final_test_accuracy_std"],
                          "final_accuracy_delta": s["final_accuracy_delta"],
                          "final_std_delta": s["final_std_delta"]})
    if args.curves:
        _write_curves(args.curves, rep.curve_rows())
    return 0


def _cmd_variance(args, out, em):
    from .learner import variance_experiment

    rep = variance_experiment(N=args.n, replications=args.reps, spec=args.dist, mc_lambda=args.mc_lambda,
                              dim=args.dim, seed=stage_seed(args.seed, STAGE_EXPERIMENT))
    em.record("variance", rep.to_record())
    return 0


COMMANDS = {
    "generate": _cmd_generate,
    "augment": _cmd_augment,
    "bounds": _cmd_bounds,
    "derivs": _cmd_derivs,
    "train": _cmd_train,
    "compare": _cmd_compare,
    "variance": _cmd_variance,
}


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = None
    try:
        out = open(args.out, "w", encoding="utf-8", newline="\n") if args.out else stdout
        return COMMANDS[args.command](args, out, Emitter(args.format, out))
    except (RimError, OSError) as exc:
        print(f"rimaug {args.command}: error: {exc}", file=sys.stderr)
        return 1
    finally:
        if out is not None and out is not stdout:
            out.close()


def main():
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
