"""Compare the compiled and pure-NumPy recursion kernels.

Run with ``python benchmarks/bench_kernels.py [--repeat R]``.
"""

import argparse
import timeit

import numpy as np

from rimaug import _pykernels

try:
    from rimaug import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    yield "batch n=1000 T=101", (rng.normal(size=(1000, 101, 1)), rng.random((1000, 100))), "rim_forward"
    yield "batch n=100 T=512 C=3", (rng.normal(size=(100, 512, 3)), rng.random((100, 511))), "rim_forward"
    yield "shared K=16384 T=33", (rng.normal(size=(33, 1)), rng.random((16384, 32))), "rim_forward_shared"


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the NumPy kernel is available")
    rng = np.random.default_rng(0)
    print(f"{'case':<26}{'numpy ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, inputs, fn in cases(rng):
        inputs = tuple(np.ascontiguousarray(a) for a in inputs)
        py = getattr(_pykernels, fn)
        t_py = min(timeit.repeat(lambda: py(*inputs), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:<26}{t_py:>12.2f}{'-':>12}{'-':>10}")
            continue
        cy = getattr(_ckernels, fn)
        np.testing.assert_allclose(np.asarray(cy(*inputs)), py(*inputs), rtol=0, atol=1e-12)
        t_cy = min(timeit.repeat(lambda: cy(*inputs), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<26}{t_py:>12.2f}{t_cy:>12.2f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
