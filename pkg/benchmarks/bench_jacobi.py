#!/usr/bin/env python3
"""Benchmark the compiled Jacobi kernel against the pure numpy fallback.

Times eigendecompositions (values-only and with vectors), the radius theta
sweep, and one end-to-end chain evaluation per backend. Run after building
the extension:

    python benchmarks/bench_jacobi.py [--dims 4,8,16,32,64] [--reps 50]
"""

import argparse
import time

import numpy as np

from radiuslab.backend import available_backends
from radiuslab.ensembles import derive_rng, standard_complex_gaussian
from radiuslab.spectral import JACOBI_MAX_SWEEPS, JACOBI_TOL


def _time(fn, reps):
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def bench_eig(kernel, h, want_vectors, reps):
    n = h.shape[0]

    def run():
        work = h.copy()
        vecs = np.eye(n, dtype=np.complex128) if want_vectors else None
        kernel.jacobi_inplace(work, vecs, JACOBI_TOL, JACOBI_MAX_SWEEPS)

    return _time(run, reps)


def bench_radius_grid(kernel, a, thetas, reps):
    def run():
        kernel.radius_h_values(a, thetas, JACOBI_TOL, JACOBI_MAX_SWEEPS)

    return _time(run, reps)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--dims", default="4,8,16,32,64")
    parser.add_argument("--reps", type=int, default=50)
    args = parser.parse_args()
    dims = [int(d) for d in args.dims.split(",")]

    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    thetas = 2.0 * np.pi * np.arange(256) / 256

    header = f"{'n':>4} {'task':<22}" + "".join(f"{name:>14}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for n in dims:
        rng = derive_rng(7, "BENCH", "ginibre", n, 0)
        g = standard_complex_gaussian(rng, (n, n))
        h = np.ascontiguousarray((g + g.conj().T) / 2.0)
        a = np.ascontiguousarray(g)
        reps = max(3, args.reps // max(1, n // 8))
        rows = [
            ("eig values", lambda k: bench_eig(k, h, False, reps)),
            ("eig values+vectors", lambda k: bench_eig(k, h, True, reps)),
            (
                "radius grid (256 pts)",
                lambda k: bench_radius_grid(k, a, thetas, max(1, reps // 8)),
            ),
        ]
        for label, runner in rows:
            times = {name: runner(kernel) for name, kernel in backends.items()}
            line = f"{n:>4} {label:<22}"
            for name in backends:
                line += f"{times[name] * 1e6:>12.1f}us"
            if len(times) == 2:
                line += f"{times['python'] / times['cython']:>9.1f}x"
            print(line)
    print()

    import radiuslab as rl

    rng = derive_rng(7, "BENCH", "ginibre", 8, 1)
    a = standard_complex_gaussian(rng, (8, 8))
    t = _time(lambda: rl.chain_thm_main(a, rl.power(2)), 20)
    print(f"end-to-end chain THM_MAIN (n=8, active backend): {t * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
