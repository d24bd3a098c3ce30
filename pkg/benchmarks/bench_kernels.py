"""Compiled vs pure-Python splitting kernel on basis pursuit problems.

Both backends run the same solver on identical instances; the table reports
the best wall time over ``--repeat`` runs and checks the iteration counts
agree.

    python3 benchmarks/bench_kernels.py --out benchmarks/kernels.csv
"""
import argparse
import csv
import sys
import time

import numpy as np

from tailcs.linalg import gaussian_matrix
from tailcs.solvers import kernel
from tailcs.solvers.splitting import SolverOptions, SynthesisProblem

CASES = [
    # (m, N, s, complex)
    (32, 64, 8, False),
    (64, 128, 24, False),
    (64, 128, 36, False),
    (32, 64, 8, True),
]


def instance(m, N, s, cplx, seed=0):
    rng = np.random.default_rng(seed)
    A = gaussian_matrix(m, N, seed)
    x = np.zeros(N, dtype=complex if cplx else float)
    T = rng.choice(N, s, replace=False)
    x[T] = rng.standard_normal(s)
    if cplx:
        A = A + 1j * gaussian_matrix(m, N, seed + 1)
        x[T] += 1j * rng.standard_normal(s)
    return A, A @ x


def time_backend(fn, problem, n, opts, repeat):
    orig = kernel.admm_steps
    kernel.admm_steps = fn
    try:
        best = np.inf
        for _ in range(repeat):
            t0 = time.perf_counter()
            rep = problem.solve(np.ones(n), opts)
            best = min(best, time.perf_counter() - t0)
    finally:
        kernel.admm_steps = orig
    return best, rep.iterations


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--max-iter", type=int, default=2000,
                   help="iteration budget; polishing is off so both backends do the same work")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    a = p.parse_args(argv)
    if kernel.compiled_admm_steps is None:
        sys.exit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    opts = SolverOptions(max_iter=a.max_iter, polish=False)
    rows = []
    for m, N, s, cplx in CASES:
        A, b = instance(m, N, s, cplx)
        problem = SynthesisProblem(A, b)
        t_c, it_c = time_backend(kernel.compiled_admm_steps, problem, N, opts, a.repeat)
        t_p, it_p = time_backend(kernel.python_admm_steps, problem, N, opts, a.repeat)
        if it_c != it_p:
            sys.exit(f"iteration counts differ on {m}x{N}: {it_c} vs {it_p}")
        rows.append({
            "m": m, "N": N, "s": s, "field": "complex" if cplx else "real",
            "iterations": it_c,
            "compiled_ms": f"{t_c * 1e3:.3f}", "python_ms": f"{t_p * 1e3:.3f}",
            "speedup": f"{t_p / t_c:.2f}",
        })

    fh = open(a.out, "w", newline="") if a.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if a.out:
            fh.close()


if __name__ == "__main__":
    main()
