"""Time the numba and numpy backends on the same evolution problems.

    python benchmarks/bench_kernels.py --n 64 --t-max 1.0

Each case evolves one cell problem for a fixed time (no early stop), once
per backend, after a warm-up run that absorbs JIT compilation.  The final
column is the numpy/numba speed ratio; the max difference between the two
backends' final fields is printed as a sanity check.
"""

import argparse
import time

import numpy as np

from effham import hamlib as hl
from effham.hjsolver import SCHEMES, SolverConfig, TorusGrid, evolve_bigT, weno3_gradients, Field

CASES = {
    "example1-2d": (lambda: hl.radial(hl.example1_profile(), 2), lambda: hl.sine_product(0.25), (0.5, 0.2)),
    "double_well-2d": (hl.double_well, lambda: hl.sine_product(2.0), (0.3, 0.1)),
    "eikonal-1d": (lambda: hl.radial(hl.eikonal_profile(), 1), lambda: hl.triangle(1.0), (0.6,)),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_evolve(name, n, t_max, scheme, repeat):
    make_h, make_v, p = CASES[name]
    H, V = make_h(), make_v()
    grid = TorusGrid(H.dimension, n if H.dimension == 2 else 8 * n)
    row = {}
    for backend in ("numba", "numpy"):
        cfg = SolverConfig(t_max=t_max, window=t_max, scheme=scheme, backend=backend, init="cossin")
        evolve_bigT(H, V, p, grid, SolverConfig(t_max=0.01, window=0.01, scheme=scheme, backend=backend))
        row[backend] = best_of(lambda: evolve_bigT(H, V, p, grid, cfg), repeat)
    diff = np.max(np.abs(row["numba"][1].field.values - row["numpy"][1].field.values))
    return grid.n, row["numba"][0], row["numpy"][0], diff


def bench_weno(n, repeat):
    grid = TorusGrid(2, n)
    x = np.arange(n) * grid.h
    w = Field(grid, np.sin(2 * np.pi * x)[:, None] * np.cos(2 * np.pi * x)[None, :])
    weno3_gradients(w, 0, "numba")
    nb, _ = best_of(lambda: weno3_gradients(w, 0, "numba"), repeat * 20)
    npy, _ = best_of(lambda: weno3_gradients(w, 0, "numpy"), repeat * 20)
    return nb, npy


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=64, help="points per axis in 2-D (1-D uses 8n)")
    ap.add_argument("--t-max", type=float, default=1.0)
    ap.add_argument("--scheme", choices=sorted(SCHEMES), default="godunov")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"{'case':<16}{'N':>6}{'numba s':>11}{'numpy s':>11}{'ratio':>8}{'max diff':>11}")
    for name in CASES:
        n, nb, npy, diff = bench_evolve(name, args.n, args.t_max, args.scheme, args.repeat)
        print(f"{name:<16}{n:>6}{nb:>11.4f}{npy:>11.4f}{npy / nb:>8.1f}{diff:>11.1e}")
    nb, npy = bench_weno(args.n, args.repeat)
    print(f"{'weno3 gradient':<16}{args.n:>6}{nb:>11.5f}{npy:>11.5f}{npy / nb:>8.1f}")


if __name__ == "__main__":
    main()
