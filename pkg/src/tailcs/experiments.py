"""Monte Carlo recovery experiments over sparsity sweeps.

Randomness is derived from seeds with ``numpy.random.SeedSequence`` and
drawn from Philox streams, so every trial is reproducible from its own seed
alone. Within a sweep cell all methods see the same instances (paired
comparison); the method does not enter the seed derivation.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

from .diagnostics import l0_bruteforce_solutions
from .errors import TailCSError
from .linalg import fourier_frame, gaussian_matrix
from .solvers.splitting import AnalysisProblem, SolverOptions, SynthesisProblem
from .tailmin import tail_min_analysis, tail_min_synthesis

CSV_FIELDS = ["s", "method", "trials", "successes", "success_rate", "mean_iterations", "mean_wall_ms"]


class Method(str, Enum):
    BP = "bp"
    TAILMIN = "tailmin"
    ANALYSIS = "analysis"
    TAIL_ANALYSIS = "tailanalysis"
    L0_ORACLE = "l0"

    @classmethod
    def parse(cls, name: str) -> "Method":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown method {name!r}; choose from {[m.value for m in cls]}") from None


@dataclass(frozen=True)
class TrialSpec:
    m: int
    N: int
    s: int
    method: Method = Method.BP
    seed: int = 0
    dictionary: tuple[int, int] | None = None
    success_tol: float = 1e-6
    solver_opts: SolverOptions = field(default_factory=SolverOptions)
    eps_outer: float = 1e-8
    max_outer: int = 50
    matrix_seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.s < 1:
            raise ValueError("s must be at least 1")
        if self.m < 1 or self.N < 1:
            raise ValueError("m and N must be positive")
        if self.method in (Method.ANALYSIS, Method.TAIL_ANALYSIS) and self.dictionary is None:
            raise ValueError(f"method {self.method.value} needs a dictionary")
        if self.dictionary is not None:
            d, n = self.dictionary
            if d != self.N:
                raise ValueError(f"dictionary rows ({d}) must equal N ({self.N})")
            if self.s > n:
                raise ValueError("s exceeds the dictionary size")
        elif self.s > self.N:
            raise ValueError("s exceeds N")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["method"] = self.method.value
        out["dictionary"] = list(self.dictionary) if self.dictionary else None
        return out


@dataclass
class TrialRecord:
    spec: TrialSpec
    success: bool
    relative_error: float
    iterations: int
    wall_ms: float
    error: str | None = None

    def to_dict(self) -> dict:
        rel = self.relative_error
        return {
            "spec": self.spec.to_dict(),
            "success": self.success,
            "relative_error": rel if math.isfinite(rel) else None,
            "iterations": self.iterations,
            "wall_ms": self.wall_ms,
            "error": self.error,
        }


@dataclass
class SweepRow:
    s: int
    method: Method
    trials: int
    successes: int
    success_rate: float
    mean_iterations: float
    mean_wall_ms: float


@dataclass
class SweepTable:
    rows: list = field(default_factory=list)
    records: list = field(default_factory=list)

    def rate(self, s: int, method) -> float:
        method = Method(method)
        for row in self.rows:
            if row.s == s and row.method is method:
                return row.success_rate
        raise KeyError((s, method))

    def to_csv(self, include_timing: bool = True) -> str:
        """CSV text; with ``include_timing=False`` wall times are written as ``nan``
        so that repeated sweeps give byte-identical output."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for r in self.rows:
            wall = _g6(r.mean_wall_ms) if include_timing else "nan"
            writer.writerow([r.s, r.method.value, r.trials, r.successes,
                             _g6(r.success_rate), _g6(r.mean_iterations), wall])
        return buf.getvalue()

    def records_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.records], indent=1)


def _g6(v: float) -> str:
    return f"{v:.6g}"


def success(x_hat, x_true, tol: float) -> tuple[bool, float]:
    """Relative l2 error of ``x_hat`` (absolute when ``x_true`` is zero) and whether it is below ``tol``."""
    x_hat = np.asarray(x_hat)
    x_true = np.asarray(x_true)
    if x_hat.shape != x_true.shape:
        raise ValueError("x_hat and x_true differ in length")
    ref = np.linalg.norm(x_true)
    err = np.linalg.norm(x_hat - x_true)
    rel = float(err / ref) if ref > 0 else float(err)
    return rel < tol, rel


def _philox(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


def derive_seed(*parts: int) -> int:
    """64-bit seed from integer parts, stable across platforms."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0])


def trial_instance(spec: TrialSpec):
    """``(A, D, x, target, b)`` for a trial; ``D`` is None without a dictionary."""
    matrix_seed, support_seed, value_seed = (
        int(v) for v in np.random.SeedSequence(int(spec.seed)).generate_state(3, np.uint64))
    if spec.matrix_seed is not None:
        matrix_seed = int(spec.matrix_seed)
    A = gaussian_matrix(spec.m, spec.N, matrix_seed)
    D = fourier_frame(*spec.dictionary) if spec.dictionary else None
    ambient = D.shape[1] if D is not None else spec.N
    support = np.sort(_philox(support_seed).choice(ambient, spec.s, replace=False))
    x = np.zeros(ambient)
    x[support] = _philox(value_seed).standard_normal(spec.s)
    target = D @ x if D is not None else x
    return A, D, x, target, A @ target


def run_trial(spec: TrialSpec) -> TrialRecord:
    """Generate one instance from ``spec.seed`` and run ``spec.method`` on it.

    With a dictionary the signal is ``f = D x`` and success is judged on
    ``f``; the synthesis methods then work with the operator ``A D``.
    ``iterations`` counts inner solver iterations (summed over outer steps
    for the tail methods).
    """
    A, D, x, target, b = trial_instance(spec)
    M = A @ D if D is not None else A
    to_signal = (lambda c: D @ c) if D is not None else (lambda c: c)
    t0 = time.perf_counter()
    try:
        if spec.method is Method.BP:
            report = SynthesisProblem(M, b).solve(np.ones(M.shape[1]), spec.solver_opts)
            estimate, iterations = to_signal(report.solution), report.iterations
        elif spec.method is Method.TAILMIN:
            report, trace = tail_min_synthesis(M, b, spec.s, spec.solver_opts,
                                               spec.eps_outer, spec.max_outer)
            estimate, iterations = to_signal(report.solution), sum(trace.inner_iterations)
        elif spec.method is Method.ANALYSIS:
            report = AnalysisProblem(A, D, b).solve(np.ones(D.shape[1]), spec.solver_opts)
            estimate, iterations = report.solution, report.iterations
        elif spec.method is Method.TAIL_ANALYSIS:
            report, trace = tail_min_analysis(A, D, b, spec.s, spec.solver_opts,
                                              spec.eps_outer, spec.max_outer)
            estimate, iterations = report.solution, sum(trace.inner_iterations)
        else:
            sols = l0_bruteforce_solutions(M, b, spec.s)
            wall = (time.perf_counter() - t0) * 1e3
            errs = [success(to_signal(z.to_dense()), target, spec.success_tol)[1] for z in sols.solutions]
            rel = max(errs) if errs else math.inf
            return TrialRecord(spec, rel < spec.success_tol, rel, len(sols.solutions), wall)
    except TailCSError as exc:
        wall = (time.perf_counter() - t0) * 1e3
        return TrialRecord(spec, False, math.inf, 0, wall, error=exc.tag)
    wall = (time.perf_counter() - t0) * 1e3
    ok, rel = success(estimate, target, spec.success_tol)
    return TrialRecord(spec, ok, rel, int(iterations), wall)


def worker_count() -> int:
    """Parallelism from ``TAILCS_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("TAILCS_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("TAILCS_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def sweep_sparsity(base: TrialSpec, s_values, methods, trials_per_cell: int,
                   fixed_matrix: bool = False, workers: int | None = None) -> SweepTable:
    """Success statistics for every ``(s, method)`` cell.

    Trial ``t`` of sparsity ``s`` is seeded with ``derive_seed(base.seed, s, t)``;
    ``fixed_matrix`` reuses one sensing matrix (seeded from ``base.seed``)
    for every trial. Rows come out ordered by ``s`` then by ``methods``.
    """
    methods = [Method(m) for m in methods]
    s_values = sorted(set(int(s) for s in s_values))
    matrix_seed = derive_seed(base.seed, 0xF1ED) if fixed_matrix else None
    specs = []
    for s in s_values:
        for t in range(trials_per_cell):
            seed = derive_seed(base.seed, s, t)
            for method in methods:
                specs.append(replace(base, s=s, method=method, seed=seed, matrix_seed=matrix_seed))
    workers = workers if workers is not None else worker_count()
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_trial, specs, chunksize=max(1, len(specs) // (8 * workers))))
    else:
        records = [run_trial(spec) for spec in specs]

    table = SweepTable(records=records)
    if trials_per_cell <= 0:
        return table
    for s in s_values:
        for method in methods:
            cell = [r for r in records if r.spec.s == s and r.spec.method is method]
            hits = sum(r.success for r in cell)
            table.rows.append(SweepRow(
                s=s,
                method=method,
                trials=len(cell),
                successes=hits,
                success_rate=hits / len(cell),
                mean_iterations=float(np.mean([r.iterations for r in cell])),
                mean_wall_ms=float(np.mean([r.wall_ms for r in cell])),
            ))
    return table
