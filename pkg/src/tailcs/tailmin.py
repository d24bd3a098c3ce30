"""Iterative l1 tail minimization.

Starting from the basis pursuit solution, each outer step keeps the ``s``
largest-modulus coordinates unpenalized and minimizes the l1 norm of the
rest subject to the measurements; the loop stops once successive iterates
agree to ``eps_outer`` in l2, when an estimated support repeats, or after
``max_outer`` solves.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .linalg import as_matrix, as_vector
from .solvers.splitting import AnalysisProblem, SolverOptions, SolverReport, SynthesisProblem


class Termination(str, Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    SUPPORT_CYCLE = "SupportCycle"


@dataclass
class TailMinTrace:
    iterates: list = field(default_factory=list)
    supports: list = field(default_factory=list)
    terminated_by: Termination = Termination.MAX_ITER
    inner_iterations: list = field(default_factory=list)

    @property
    def outer_iterations(self) -> int:
        return len(self.iterates)

    def to_dict(self) -> dict:
        def enc(v):
            if np.iscomplexobj(v):
                return [[float(a.real), float(a.imag)] for a in v]
            return [float(a) for a in v]

        return {
            "terminated_by": self.terminated_by.value,
            "iterates": [enc(v) for v in self.iterates],
            "supports": [[int(i) for i in T] for T in self.supports],
            "inner_iterations": list(self.inner_iterations),
        }


def top_s_support(x, s: int) -> np.ndarray:
    """Indices of the ``s`` largest-modulus entries, ties toward the smaller index, sorted."""
    x = np.asarray(x)
    if not 1 <= s <= x.shape[0]:
        raise ValueError(f"s must lie in [1, {x.shape[0]}], got {s}")
    order = np.argsort(-np.abs(x), kind="stable")
    return np.sort(order[:s])


def tail_l1(x, s: int) -> float:
    """l1 norm of ``x`` outside its ``s`` largest-modulus entries."""
    x = np.asarray(x)
    if not 0 <= s <= x.shape[0]:
        raise ValueError(f"s must lie in [0, {x.shape[0]}], got {s}")
    if s == 0:
        return float(np.abs(x).sum())
    mask = np.ones(x.shape[0], dtype=bool)
    mask[top_s_support(x, s)] = False
    return float(np.abs(x[mask]).sum())


def _run(problem, n_coef, coeffs, s, opts, eps_outer, max_outer):
    if max_outer < 1:
        raise ValueError("max_outer must be at least 1")
    trace = TailMinTrace()
    report = problem.solve(np.ones(n_coef), opts)
    reports = [report]
    trace.iterates.append(report.solution)
    trace.inner_iterations.append(report.iterations)
    seen = set()
    prev_T = None
    while True:
        if len(trace.iterates) >= max_outer:
            trace.terminated_by = Termination.MAX_ITER
            break
        T = top_s_support(coeffs(trace.iterates[-1]), s)
        key = T.tobytes()
        if prev_T is not None and np.array_equal(T, prev_T):
            # identical subproblem: the deterministic solver returns the same point
            new = reports[-1]
        elif key in seen:
            trace.terminated_by = Termination.SUPPORT_CYCLE
            break
        else:
            w = np.ones(n_coef)
            w[T] = 0.0
            new = problem.solve(w, opts)
        seen.add(key)
        prev_T = T
        trace.supports.append(T)
        reports.append(new)
        trace.iterates.append(new.solution)
        trace.inner_iterations.append(new.iterations if new is not reports[-2] else 0)
        if np.linalg.norm(trace.iterates[-1] - trace.iterates[-2]) < eps_outer:
            trace.terminated_by = Termination.CONVERGED
            break

    if trace.terminated_by is Termination.SUPPORT_CYCLE:
        tails = [tail_l1(coeffs(v), s) for v in trace.iterates]
        best = int(np.argmin(tails))
        return reports[best], trace
    return reports[-1], trace


def tail_min_synthesis(A, b, s: int, opts: SolverOptions | None = None,
                       eps_outer: float = 1e-8, max_outer: int = 50,
                       problem: SynthesisProblem | None = None) -> tuple[SolverReport, TailMinTrace]:
    """Tail minimization for ``A x = b`` with known sparsity ``s``.

    Returns the report of the selected subproblem (the last one, or on a
    support cycle the iterate with the smallest tail) and the full trace.
    ``problem`` may carry a prebuilt :class:`SynthesisProblem` for ``(A, b)``.
    """
    A = as_matrix(A)
    N = A.shape[1]
    if not 1 <= s < N:
        raise ValueError(f"s must satisfy 1 <= s < {N}")
    problem = problem or SynthesisProblem(A, as_vector(b))
    return _run(problem, N, lambda x: x, s, opts, eps_outer, max_outer)


def tail_min_analysis(A, D, b, s: int, opts: SolverOptions | None = None,
                      eps_outer: float = 1e-8, max_outer: int = 50,
                      problem: AnalysisProblem | None = None) -> tuple[SolverReport, TailMinTrace]:
    """Tail minimization on the analysis coefficients ``D* f`` subject to ``A f = b``.

    Iterates in the trace are signals ``f``; supports index columns of ``D``.
    """
    A = as_matrix(A)
    D = as_matrix(D)
    if A.shape[1] != D.shape[0]:
        raise ValueError("A.cols must equal D.rows")
    n = D.shape[1]
    if not 1 <= s < n:
        raise ValueError(f"s must satisfy 1 <= s < {n}")
    problem = problem or AnalysisProblem(A, D, as_vector(b))
    Dh = D.conj().T
    return _run(problem, n, lambda f: Dh @ f, s, opts, eps_outer, max_outer)
