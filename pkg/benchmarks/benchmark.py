"""Compare the compiled and NumPy kernels on random inputs.

    python benchmarks/benchmark.py [--sizes 6 8 12 16] [--repeat 5]
"""
import argparse
import sys
import timeit

import numpy as np

from finitepsido import kernels
from finitepsido.group import Group


def inputs(n, rng):
    G = Group((n,))
    c = lambda *s: rng.standard_normal(s) + 1j * rng.standard_normal(s)  # noqa: E731
    return {
        "twisted_convolution": (c(n, n), c(n, n), G.pairing_matrix, G.sub_table),
        "diagonal_envelope": (c(n, n), G.sub_table),
        "phase_stft": (c(n, n), c(n, n), G.pairing_matrix, G.sub_table),
        "envelope_sup": (c(n, n, n, n),),
    }


def best(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05 and number < 10_000:
        number *= 2
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[6, 8, 12, 16])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.compiled_impl is None:
        print("compiled extension not built; run `python setup.py build_ext --inplace`")
        return 1

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'|G|':>5}{'python (ms)':>14}{'compiled (ms)':>15}{'speedup':>9}{'max diff':>11}")
    for n in args.sizes:
        for name, a in inputs(n, rng).items():
            a = tuple(np.ascontiguousarray(x) for x in a)
            py, cy = getattr(kernels.python_impl, name), getattr(kernels.compiled_impl, name)
            diff = np.max(np.abs(py(*a) - cy(*a)))
            tp, tc = best(py, a, args.repeat), best(cy, a, args.repeat)
            print(f"{name:<22}{n:>5}{tp * 1e3:>14.3f}{tc * 1e3:>15.3f}{tp / tc:>8.1f}x{diff:>11.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
