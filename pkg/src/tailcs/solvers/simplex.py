"""Exact basis pursuit for small real problems by dense tableau simplex.

Basis pursuit is posed as the linear program

    minimize  sum(p + q)   subject to  A p - A q = b,  p, q >= 0,

with ``x = p - q``. Pivoting follows Bland's rule throughout, so the method
terminates on degenerate problems and is deterministic.
"""
from __future__ import annotations

import numpy as np

from ..errors import FieldError, Infeasible, RankDeficient, SizeLimit, Unbounded
from ..linalg import as_matrix, as_vector, is_real
from .splitting import SolverReport

MAX_ROWS = 32
MAX_COLS = 64
_PIVOT_TOL = 1e-11


def _pivot(T, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _bland(T, basis, allowed, tol):
    """Run primal simplex on tableau ``T`` (last row = reduced costs, last col = rhs)."""
    m = T.shape[0] - 1
    pivots = 0
    limit = 50 * T.shape[1] * max(m, 1)
    while True:
        costs = T[-1, :-1]
        entering = -1
        for j in np.flatnonzero(allowed):
            if costs[j] < -tol:
                entering = j
                break
        if entering < 0:
            return pivots
        column = T[:m, entering]
        eligible = np.flatnonzero(column > tol)
        if eligible.size == 0:
            raise Unbounded("linear program is unbounded")
        ratios = np.maximum(T[eligible, -1], 0.0) / column[eligible]
        best = ratios.min()
        ties = eligible[ratios <= best + 1e-12 * (1.0 + abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, row, entering)
        basis[row] = entering
        pivots += 1
        if pivots > limit:
            raise RuntimeError("simplex pivot limit exceeded")


def simplex_bp(A, b) -> SolverReport:
    """Exact minimizer of ``||x||_1`` subject to ``A x = b`` (real data only).

    Returns the optimal vertex found by two-phase simplex. Raises
    :class:`SizeLimit` beyond 32 x 64, :class:`Infeasible` when ``b`` is
    numerically outside ``range(A)``.
    """
    A = as_matrix(A)
    b = as_vector(b)
    if not (is_real(A) and is_real(b)):
        raise FieldError("simplex_bp is restricted to the real field")
    A = np.real(A).astype(float)
    b = np.real(b).astype(float)
    m, N = A.shape
    if b.shape[0] != m:
        raise ValueError("length of b must equal the row count of A")
    if m > MAX_ROWS or N > MAX_COLS:
        raise SizeLimit(f"simplex_bp limited to {MAX_ROWS}x{MAX_COLS}, got {m}x{N}")
    sv = np.linalg.svd(A, compute_uv=False)
    if m > N or sv[0] == 0 or sv[-1] <= 1e-10 * sv[0]:
        raise RankDeficient("simplex_bp needs A with full row rank")

    scale = max(1.0, float(np.abs(A).max()), float(np.abs(b).max()))
    tol = _PIVOT_TOL * scale
    n_struct = 2 * N
    sign = np.where(b < 0, -1.0, 1.0)
    # columns: p (N), q (N), artificials (m), rhs
    T = np.zeros((m + 1, n_struct + m + 1))
    T[:m, :N] = A * sign[:, None]
    T[:m, N:n_struct] = -A * sign[:, None]
    T[:m, n_struct:n_struct + m] = np.eye(m)
    T[:m, -1] = b * sign
    basis = list(range(n_struct, n_struct + m))

    # phase 1: minimize the sum of artificials
    T[-1, :] = 0.0
    T[-1, :n_struct] = -T[:m, :n_struct].sum(axis=0)
    T[-1, -1] = -T[:m, -1].sum()
    allowed = np.zeros(n_struct + m, dtype=bool)
    allowed[:n_struct] = True
    pivots = _bland(T, basis, allowed, tol)
    if -T[-1, -1] > 1e-9 * max(1.0, float(np.abs(b).sum())):
        raise Infeasible("b is outside the range of A")

    # drive zero-level artificials out of the basis
    keep_rows = []
    for i in range(m):
        if basis[i] >= n_struct:
            cols = np.flatnonzero(np.abs(T[i, :n_struct]) > tol)
            if cols.size:
                _pivot(T, i, int(cols[0]))
                basis[i] = int(cols[0])
                pivots += 1
                keep_rows.append(i)
        else:
            keep_rows.append(i)
    rows = keep_rows + [m]
    T = T[rows][:, list(range(n_struct)) + [T.shape[1] - 1]]
    basis = [basis[i] for i in keep_rows]
    m2 = len(basis)

    # phase 2: cost 1 on every structural column
    T[-1, :] = 0.0
    T[-1, :n_struct] = 1.0
    for i, j in enumerate(basis):
        T[-1] -= T[-1, j] * T[i]
    pivots += _bland(T, basis, np.ones(n_struct, dtype=bool), tol)

    z = np.zeros(n_struct)
    for i, j in enumerate(basis):
        z[j] = T[i, -1]
    x = z[:N] - z[N:]
    reduced = T[-1, :n_struct]
    return SolverReport(
        solution=x,
        objective=float(np.abs(x).sum()),
        primal_residual=float(np.linalg.norm(A @ x - b)),
        dual_residual=float(max(0.0, -reduced.min())) if m2 else 0.0,
        iterations=int(pivots),
        converged=True,
    )
