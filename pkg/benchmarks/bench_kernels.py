"""Compare the compiled and pure-Python propagation kernels.

    python3 benchmarks/bench_kernels.py [--sites N] [--steps N] [--repeat R]

Prints the best-of-R wall time of each backend, the speed-up and the largest
entrywise difference between the two results.
"""
import argparse
import timeit

import numpy as np

from scatspec._kernels import compiled_kernels, python_kernels, rk4_propagate, transfer_product


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<8} {best * 1e3:10.3f} ms")
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sites", type=int, default=200_000)
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if compiled_kernels is None:
        print("compiled kernels unavailable (extension not built or SCATSPEC_PURE_PYTHON set)")
        return 1

    rng = np.random.default_rng(0)
    # small potential keeps the transfer product bounded over many sites
    v = 1e-3 * rng.standard_normal(args.sites)
    x = np.linspace(-5, 5, args.steps + 1)
    vs, vm, ve = np.exp(-x[:-1] ** 2), np.exp(-(0.5 * (x[:-1] + x[1:])) ** 2), np.exp(-x[1:] ** 2)
    h = x[1] - x[0]

    cases = {
        f"transfer_product ({args.sites} sites)":
            lambda impl: transfer_product(0.3, v, impl=impl),
        f"rk4_propagate ({args.steps} steps)":
            lambda impl: rk4_propagate(1.0, h, vs, vm, ve, impl=impl),
    }
    for name, run in cases.items():
        print(name)
        tp = bench("python", lambda: run(python_kernels), args.repeat)
        tc = bench("cython", lambda: run(compiled_kernels), args.repeat)
        diff = float(np.max(np.abs(run(python_kernels) - run(compiled_kernels))))
        print(f"  speed-up {tp / tc:8.1f}x   max |difference| {diff:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
