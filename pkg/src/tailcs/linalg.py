"""Dense linear algebra over real and complex scalars.

Matrices and vectors are plain numpy arrays. A matrix belongs to the real
field when its dtype is real (or it is complex with identically zero
imaginary parts, in which case :func:`as_matrix` narrows it to float64).
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .errors import RankDeficient

DEFAULT_TOL = 1e-10


def _narrow(arr: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(arr):
        arr = np.asarray(arr, dtype=np.complex128)
        if not np.any(arr.imag):
            return np.ascontiguousarray(arr.real)
        return arr
    return np.asarray(arr, dtype=np.float64)


def as_matrix(A) -> np.ndarray:
    """Validate ``A`` as a finite 2-D matrix, returning float64 or complex128."""
    A = _narrow(np.asarray(A))
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def as_vector(v) -> np.ndarray:
    v = _narrow(np.asarray(v))
    if v.ndim == 2 and 1 in v.shape:
        v = v.reshape(-1)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a nonempty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def is_real(A) -> bool:
    return not np.iscomplexobj(A) or not np.any(np.imag(A))


def as_support(T, ambient: int) -> np.ndarray:
    """Normalize an index collection into a sorted, duplicate-free int array."""
    idx = np.asarray(sorted(int(i) for i in T), dtype=np.intp)
    if idx.size and (idx[0] < 0 or idx[-1] >= ambient):
        raise ValueError(f"support indices must lie in [0, {ambient})")
    if np.any(np.diff(idx) == 0):
        raise ValueError("support has duplicate indices")
    return idx


def gaussian_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """Real m x n matrix of i.i.d. standard normal entries.

    The stream comes from numpy's counter-based Philox bit generator keyed by
    ``seed``, so the same ``(m, n, seed)`` reproduces the same matrix bit for
    bit on every platform.
    """
    if m < 1 or n < 1:
        raise ValueError("gaussian_matrix needs m >= 1 and n >= 1")
    rng = np.random.Generator(np.random.Philox(key=int(seed) % 2**64))
    return rng.standard_normal((m, n))


def fourier_frame(d: int, n: int) -> np.ndarray:
    """Oversampled DFT frame: entry (j, k) = exp(2 pi i j k / n) / sqrt(d).

    Columns have unit norm and ``D @ D.conj().T == (n / d) * I``.
    """
    if not 1 <= d <= n:
        raise ValueError(f"fourier_frame needs 1 <= d <= n, got d={d}, n={n}")
    jk = np.outer(np.arange(d), np.arange(n)) % n
    return np.exp(2j * np.pi * jk / n) / np.sqrt(d)


def submatrix_columns(A, T) -> np.ndarray:
    A = as_matrix(A)
    idx = as_support(T, A.shape[1])
    return A[:, idx]


def least_squares(A, b, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Least-squares solution of ``A x = b`` for full-column-rank ``A``.

    Returns ``(x, residual_norm)``; raises :class:`RankDeficient` when the
    smallest singular value is at most ``tol`` times the largest.
    """
    A = as_matrix(A)
    b = np.asarray(b)
    if A.shape[0] != b.shape[0]:
        raise ValueError("row count of A does not match length of b")
    U, sv, Vh = np.linalg.svd(A, full_matrices=False)
    if sv[0] == 0 or sv[-1] <= tol * sv[0]:
        raise RankDeficient(f"least_squares: condition exceeds 1/tol (sv={sv[-1]:.3e})")
    x = Vh.conj().T @ ((U.conj().T @ b) / sv)
    return x, float(np.linalg.norm(A @ x - b))


def numerical_rank(A, tol: float = DEFAULT_TOL) -> int:
    sv = np.linalg.svd(np.asarray(A), compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def kernel_basis(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical null space of ``A``."""
    A = as_matrix(A)
    _, sv, Vh = np.linalg.svd(A, full_matrices=True)
    rank = int(np.count_nonzero(sv > tol * sv[0])) if sv[0] > 0 else 0
    return np.ascontiguousarray(Vh[rank:].conj().T)


class AffineProjector:
    """Cached Cholesky factor of ``A A*`` for repeated projections onto ``{x : Ax = b}``.

    Immutable once built; safe to share between threads.
    """

    def __init__(self, A, tol: float = DEFAULT_TOL):
        A = as_matrix(A)
        m, n = A.shape
        sv = np.linalg.svd(A, compute_uv=False)
        if m > n or sv[0] == 0 or sv[-1] <= tol * sv[0]:
            raise RankDeficient("A does not have full row rank")
        self.A = A
        self._cho = sla.cho_factor(A @ A.conj().T)

    def project(self, b, x0) -> np.ndarray:
        A = self.A
        b = np.asarray(b)
        x0 = np.asarray(x0)
        if b.shape != (A.shape[0],) or x0.shape != (A.shape[1],):
            raise ValueError("shape mismatch in affine projection")
        resid = A @ x0 - b
        return x0 - A.conj().T @ sla.cho_solve(self._cho, resid)


def affine_project(A, b, x0, cache: AffineProjector | None = None) -> np.ndarray:
    """Euclidean projection of ``x0`` onto ``{x : A x = b}``."""
    if cache is None:
        cache = AffineProjector(A)
    return cache.project(b, x0)
