"""Time the numba and pure-numpy paths of each hot kernel.

Run with ``python3 benchmarks/bench_kernels.py [--repeat R]``. Each kernel is
called once per path to warm the JIT cache, then timed over ``R`` repeats and
the best time is reported. Results of both paths are also compared.
"""

import argparse
import timeit

import numpy as np

from gtransfer import _accel
from gtransfer._kernels import bilinear_rows, christoffel, lgamma_array, recurrence_table
from gtransfer.orthopoly import FamilySpec, monic_recurrence, szego_recurrence


def cases():
    """Yield ``(name, kernel, args)`` at sizes typical of sweeps."""
    x = np.linspace(-1.0, 1.0, 2000)
    a, b, c = szego_recurrence(FamilySpec.jacobi(1.0, 0.5), 128)
    yield "recurrence_table 2000x128", recurrence_table, (x, a, b, c, 128)

    alpha, beta = monic_recurrence(FamilySpec.laguerre(1.5), 257)
    y = np.linspace(0.01, 900.0, 2000)
    yield "christoffel 2000x256", christoffel, (y, alpha, np.sqrt(beta), 256)

    rng = np.random.default_rng(0)
    A = rng.standard_normal((256, 129))
    W = rng.standard_normal((129, 129))
    yield "bilinear_rows 256x129", bilinear_rows, (A, W + W.T)

    yield "lgamma_array 1e5", lgamma_array, (np.geomspace(1e-3, 1e6, 100_000),)


def max_diff(u, v):
    if isinstance(u, tuple):
        return max(max_diff(p, q) for p, q in zip(u, v))
    return float(np.max(np.abs(np.asarray(u) - np.asarray(v)) / np.maximum(1.0, np.abs(v))))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not _accel.HAS_NUMBA:
        print("numba is not installed; only the numpy path is available")
    print(f"{'kernel':<28}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max rel diff':>14}")
    for name, kern, kargs in cases():
        ref = kern.numpy(*kargs)
        t_np = min(timeit.repeat(lambda: kern.numpy(*kargs), number=1, repeat=args.repeat))
        if _accel.HAS_NUMBA:
            out = kern.jit(*kargs)
            t_jit = min(timeit.repeat(lambda: kern.jit(*kargs), number=1, repeat=args.repeat))
            print(f"{name:<28}{1e3 * t_np:>12.3f}{1e3 * t_jit:>12.3f}{t_np / t_jit:>10.1f}"
                  f"{max_diff(out, ref):>14.2e}")
        else:
            print(f"{name:<28}{1e3 * t_np:>12.3f}{'-':>12}{'-':>10}{'-':>14}")


if __name__ == "__main__":
    main()
