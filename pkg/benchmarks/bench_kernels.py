"""Compiled vs pure-Python kernels: timings and agreement.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one row per kernel with the best-of-N time per call for each
backend, the speedup and the largest relative difference of the outputs.
"""
import argparse
import timeit

import numpy as np

from reslab.specfun import available_backends


def cases(rng):
    z = (rng.uniform(0.5, 40, 64) * np.exp(1j * rng.uniform(0.0, 3.0, 64))).astype(complex)
    lam = [complex(x, y) for x, y in zip(rng.uniform(-30, 30, 50), rng.uniform(0.01, 30, 50))]
    A = rng.standard_normal((64, 64))
    A = A + A.T
    return {
        "jh_scaled_many(64 pts, n<=40)": (lambda k: k.jh_scaled_many(z, 40), 1),
        "matching_det(nu=5, 50 pts)": (
            lambda k: [k.matching_det(5, w, 1, 1.0, 1.0, 1) for w in lam], 50),
        "jacobi_eigh(64x64)": (lambda k: k.jacobi_eigh(A), 1),
    }


def _flat(out):
    if isinstance(out, tuple) and len(out) == 2 and isinstance(out[0], np.ndarray):
        return np.concatenate([np.sort(np.ravel(out[0])), np.ravel(np.abs(out[1]))])
    if isinstance(out, tuple):
        return np.concatenate([np.ravel(np.asarray(x)) for x in out])
    return np.array([c[0] * np.exp(c[1]) for c in out])


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only timing the pure kernels")
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'python/call':>12s} {'cython/call':>12s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, (fn, per) in cases(rng).items():
        times, outs = {}, {}
        for bname, mod in backends.items():
            outs[bname] = _flat(fn(mod))
            n = 3 if bname == "python" else 20
            times[bname] = min(timeit.repeat(lambda: fn(mod), number=n, repeat=args.repeat)) / n / per
        py = times["python"]
        cy = times.get("cython")
        if cy is None:
            print(f"{name:32s} {py * 1e6:10.1f}us {'-':>12s}")
            continue
        a, b = outs["python"], outs["cython"]
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        print(f"{name:32s} {py * 1e6:10.1f}us {cy * 1e6:10.1f}us {py / cy:7.1f}x {diff:13.2e}")


if __name__ == "__main__":
    main()
