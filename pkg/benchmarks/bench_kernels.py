"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--n 200000] [--repeat 5]

Prints the best-of-repeat wall time per kernel and backend, the speed-up of
the compiled backend, and the largest difference between the two outputs.
"""
import argparse
import timeit

import numpy as np

from locwave.kernels import backends


def cases(n, rng):
    x = rng.uniform(0, 60, n)
    z = rng.uniform(-30, 30, n) + 1j * rng.uniform(-5, 5, n)
    gamma = rng.uniform(-20, 20, n)
    beta2 = rng.uniform(0, 400, n)
    coeffs = rng.standard_normal(17) + 1j * rng.standard_normal(17)
    return {
        "j0_real": ((x,), {}),
        "j1_real": ((x,), {}),
        "csinc": ((z,), {}),
        "sinc_series(17 terms)": ((gamma, beta2, coeffs, -8), {}),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="points per call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    impls = backends()
    if "cython" not in impls:
        print("compiled backend not built; only the numpy backend is timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':24s} " + " ".join(f"{name:>12s}" for name in impls) + "   speed-up   max |diff|")
    for kernel, (a, kw) in cases(args.n, rng).items():
        fname = kernel.split("(")[0]
        times, outs = {}, {}
        for name, mod in impls.items():
            f = getattr(mod, fname)
            outs[name] = f(*a, **kw)
            times[name] = min(timeit.repeat(lambda: f(*a, **kw), number=1, repeat=args.repeat))
        line = f"{kernel:24s} " + " ".join(f"{times[n] * 1e3:10.2f}ms" for n in impls)
        if "cython" in impls:
            diff = float(np.max(np.abs(np.asarray(outs["cython"]) - np.asarray(outs["numpy"]))))
            line += f"   {times['numpy'] / times['cython']:7.2f}x   {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
