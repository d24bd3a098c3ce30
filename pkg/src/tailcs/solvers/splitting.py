"""Equality-constrained weighted l1 minimization by operator splitting.

Both problem forms are reduced to one problem in coefficient space,

    minimize  sum_j w_j |y_j|   subject to  y in V,

where ``V`` is an affine subspace: ``V = {x : A x = b}`` for the synthesis
form and ``V = {D* f : A f = b}`` for the analysis form. ``V`` is stored as a
point ``y0`` plus an orthonormal basis ``Q`` of its direction space, so the
projection onto ``V`` is the fixed affine map ``c -> Q Q* (c - y0) + y0`` and
does not depend on the penalty parameter.

The alternating prox/projection loop lives in :mod:`.kernel`. Whenever the
support of the prox iterate settles, an active-set polish solves for the
point of ``V`` vanishing off that support and accepts it only if it carries
an exact dual certificate: a subgradient ``g`` with ``Q* g = 0``,
``g_j = w_j sgn(y_j)`` on the support and ``|g_j| <= w_j`` elsewhere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import AffineProjector, as_matrix, as_vector, kernel_basis
from . import kernel as _kernel

POLISH_EVERY = 200
STABLE_WINDOW = 5
OVER_RELAXATION = 1.6


@dataclass(frozen=True)
class SolverOptions:
    penalty: float = 1.0
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_iter: int = 20000
    polish: bool = True

    def __post_init__(self):
        if not (self.penalty > 0 and self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("penalty and tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class SolverReport:
    """Outcome of one solve.

    ``converged`` is a flag, never an exception: after ``max_iter`` iterations
    the best feasible iterate is returned with ``converged=False``.
    ``polished`` marks solutions certified by the active-set step.
    """

    solution: np.ndarray
    objective: float
    primal_residual: float
    dual_residual: float
    iterations: int
    converged: bool
    polished: bool = False

    def to_dict(self) -> dict:
        sol = self.solution
        if np.iscomplexobj(sol):
            values = [[float(v.real), float(v.imag)] for v in sol]
        else:
            values = [float(v) for v in sol]
        return {
            "solution": values,
            "objective": self.objective,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "polished": self.polished,
        }


def soft_threshold(z, kappa):
    """Complex-safe soft thresholding ``z * max(1 - kappa/|z|, 0)``.

    Works elementwise on arrays; the phase (or sign) of ``z`` is preserved
    and ``|out| = max(|z| - kappa, 0)``.
    """
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa < 0):
        raise ValueError("kappa must be nonnegative")
    z = np.asarray(z)
    mag = np.abs(z)
    safe = np.where(mag > 0, mag, 1.0)
    out = z * np.where(mag > kappa, 1.0 - kappa / safe, 0.0)
    return out[()] if out.ndim == 0 else out


def _sgn(v):
    mag = np.abs(v)
    return np.where(mag > 0, v / np.where(mag > 0, mag, 1.0), 0.0)


def _check_weights(weights, n):
    w = np.ascontiguousarray(weights, dtype=np.float64).reshape(-1)
    if w.shape != (n,):
        raise ValueError(f"expected {n} weights, got {w.shape[0]}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and nonnegative")
    return w


class _CoefficientProblem:
    """Affine set ``V = y0 + range(Q)`` with its projector precomputed."""

    def __init__(self, y0, Q):
        dtype = np.result_type(y0, Q)
        self.y0 = np.ascontiguousarray(y0, dtype=dtype)
        self.Q = np.ascontiguousarray(Q, dtype=dtype)
        self.n = self.y0.shape[0]
        self.L = np.ascontiguousarray(self.Q @ self.Q.conj().T)
        self.g = np.ascontiguousarray(self.y0 - self.L @ self.y0)
        self.dtype = dtype

    # subclasses map a coefficient vector back to the caller's variable
    def recover(self, y):
        raise NotImplementedError

    def constraint_residual(self, sol) -> float:
        raise NotImplementedError

    def _polish(self, w, active, ghat, opts):
        """Try the point of V vanishing off ``active``; return it with residuals or None."""
        Q, y0 = self.Q, self.y0
        k = Q.shape[1]
        off = ~active
        n_off = int(np.count_nonzero(off))
        if n_off < k:
            return None
        B = Q[off]
        if k:
            c, _, rank, _ = np.linalg.lstsq(B, -y0[off], rcond=None)
            if rank < k:
                return None
            y = y0 + Q @ c
        else:
            y = y0.copy()
        scale = 1.0 + np.linalg.norm(y0)
        if np.linalg.norm(y[off]) > 1e-10 * scale:
            return None
        y[off] = 0.0
        grad = np.zeros(self.n, dtype=np.result_type(self.dtype, float))
        grad[active] = w[active] * _sgn(y[active])
        if k and n_off:
            Bh = B.conj().T
            rhs = -(Q[active].conj().T @ grad[active])
            g_off = ghat[off]
            corr = np.linalg.lstsq(Bh, rhs - Bh @ g_off, rcond=None)[0]
            g_off = g_off + corr
            if np.linalg.norm(Q.conj().T @ np.where(off, 0, grad) + Bh @ g_off) > 1e-9 * (1 + np.linalg.norm(grad)):
                return None
            grad[off] = g_off
        elif k:
            if np.linalg.norm(Q.conj().T @ grad) > 1e-9 * (1 + np.linalg.norm(grad)):
                return None
        violation = np.linalg.norm(np.maximum(np.abs(grad[off]) - w[off], 0.0))
        sqn = np.sqrt(self.n)
        eps_dual = opts.abs_tol * sqn + opts.rel_tol * np.linalg.norm(grad)
        if violation >= eps_dual:
            return None
        return y, violation, eps_dual

    def solve(self, weights, opts: SolverOptions | None = None) -> SolverReport:
        opts = opts or SolverOptions()
        w = _check_weights(weights, self.n)
        n = self.n
        z = np.zeros(n, dtype=self.dtype)
        u = np.zeros(n, dtype=self.dtype)
        y = np.zeros(n, dtype=self.dtype)
        support = np.zeros(n, dtype=np.uint8)
        tried = np.zeros(n, dtype=np.uint8)
        check_tried = 0
        stable = 0
        it = 0
        rho = float(opts.penalty)
        r = s = 0.0
        while it < opts.max_iter:
            budget = min(POLISH_EVERY, opts.max_iter - it)
            status, steps, stable, r, s, eps_pri, eps_dual = _kernel.admm_steps(
                self.L, self.g, w, z, u, y, support, tried, check_tried,
                rho, OVER_RELAXATION, opts.abs_tol, opts.rel_tol, budget,
                STABLE_WINDOW, stable)
            it += steps
            if status == _kernel.CONVERGED:
                return self._report(y, w, r, s, it, True, False)
            if opts.polish:
                tried[:] = support
                check_tried = 1
                active = (support != 0) | (w == 0)
                polished = self._polish(w, active, rho * u, opts)
                if polished is not None:
                    yp, violation, _ = polished
                    sol = self.recover(yp)
                    return SolverReport(
                        solution=sol,
                        objective=float(np.sum(w * np.abs(yp))),
                        primal_residual=self.constraint_residual(sol),
                        dual_residual=float(violation),
                        iterations=it,
                        converged=True,
                        polished=True,
                    )
        return self._report(y, w, r, s, it, False, False)

    def _report(self, y, w, r, s, it, converged, polished):
        # y is the projected iterate, hence feasible
        return SolverReport(
            solution=self.recover(y.copy()),
            objective=float(np.sum(w * np.abs(y))),
            primal_residual=float(r),
            dual_residual=float(s),
            iterations=int(it),
            converged=bool(converged),
            polished=polished,
        )


class SynthesisProblem(_CoefficientProblem):
    """``min sum w_j |x_j|  s.t.  A x = b``; reusable across weight vectors."""

    def __init__(self, A, b, projector: AffineProjector | None = None):
        A = as_matrix(A)
        b = as_vector(b)
        if b.shape[0] != A.shape[0]:
            raise ValueError("length of b must equal the row count of A")
        projector = projector or AffineProjector(A)
        dtype = np.result_type(A, b)
        x0 = projector.project(b, np.zeros(A.shape[1], dtype=dtype))
        super().__init__(x0, kernel_basis(A))
        self.A, self.b = A, b

    def recover(self, y):
        return y

    def constraint_residual(self, sol):
        return float(np.linalg.norm(self.A @ sol - self.b))


class AnalysisProblem(_CoefficientProblem):
    """``min sum w_j |(D* f)_j|  s.t.  A f = b``.

    Coefficients ``y = D* f`` range over ``D* f0 + range(D* N)`` with ``N``
    a kernel basis of ``A``; ``f`` is recovered through the pseudo-inverse of
    ``D* N``.
    """

    def __init__(self, A, D, b, projector: AffineProjector | None = None):
        A = as_matrix(A)
        D = as_matrix(D)
        b = as_vector(b)
        if A.shape[1] != D.shape[0]:
            raise ValueError("A.cols must equal D.rows")
        if b.shape[0] != A.shape[0]:
            raise ValueError("length of b must equal the row count of A")
        projector = projector or AffineProjector(A)
        dtype = np.result_type(A, D, b)
        f0 = projector.project(b, np.zeros(A.shape[1], dtype=dtype))
        N = kernel_basis(A)
        Dh = D.conj().T
        B = Dh @ N
        U, sv, _ = np.linalg.svd(B, full_matrices=False)
        rank = int(np.count_nonzero(sv > 1e-10 * sv[0])) if sv.size and sv[0] > 0 else 0
        super().__init__(Dh @ f0, U[:, :rank])
        self.A, self.D, self.b = A, D, b
        self.f0, self.N = f0, N
        self._Bpinv = np.linalg.pinv(B, rcond=1e-10) if N.shape[1] else np.zeros((0, D.shape[1]))

    def recover(self, y):
        if self.N.shape[1] == 0:
            return self.f0.copy()
        return self.f0 + self.N @ (self._Bpinv @ (y - self.y0))

    def coefficients(self, f):
        return self.D.conj().T @ f

    def constraint_residual(self, sol):
        return float(np.linalg.norm(self.A @ sol - self.b))


def solve_weighted_l1(A, b, weights, opts: SolverOptions | None = None) -> SolverReport:
    """Minimize ``sum_j weights_j |x_j|`` subject to ``A x = b``.

    Parameters
    ----------
    A : (m, N) array, real or complex, full row rank
    b : (m,) array
    weights : (N,) nonnegative array
        Zero weights leave coordinates unpenalized; unit weights give basis
        pursuit.
    opts : SolverOptions, optional

    Returns
    -------
    SolverReport

    Raises
    ------
    RankDeficient
        If ``A A*`` is numerically singular.
    """
    return SynthesisProblem(A, b).solve(weights, opts)


def solve_weighted_l1_analysis(A, D, b, weights, opts: SolverOptions | None = None) -> SolverReport:
    """Minimize ``sum_j weights_j |(D* f)_j|`` subject to ``A f = b``."""
    return AnalysisProblem(A, D, b).solve(weights, opts)
