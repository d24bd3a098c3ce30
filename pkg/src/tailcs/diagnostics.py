"""Brute-force and LP oracles for sparse-recovery theory.

Spark and l0 enumeration walk column subsets with batched SVDs; the null
space property and the single-vector recovery certificate are decided by
small linear programs over a kernel basis (solved with HiGHS, independently
of the in-house simplex used for basis pursuit).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.optimize import linprog

from .errors import FieldError, SizeLimit
from .linalg import DEFAULT_TOL, as_matrix, as_support, as_vector, is_real, kernel_basis
from .tailmin import top_s_support

NONZERO_TOL = 1e-9
SPARK_SIZE_LIMIT = 24
L0_SUBSET_LIMIT = 10**6
NSP_SUPPORT_LIMIT = 20
_LP_MARGIN = 1e-9
_CHUNK = 4096


@dataclass(frozen=True)
class SparseSignal:
    ambient: int
    support: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.support)
        if raw.size > 1 and np.any(np.diff(raw) <= 0):
            raise ValueError("support must be strictly increasing")
        support = as_support(raw, self.ambient)
        values = np.asarray(self.values)
        if values.shape != support.shape:
            raise ValueError("support and values differ in length")
        if np.any(np.abs(values) <= 1e-12):
            raise ValueError("SparseSignal values must be nonzero")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_dense(cls, x, tol: float = NONZERO_TOL) -> "SparseSignal":
        x = np.asarray(x)
        idx = np.flatnonzero(np.abs(x) > tol)
        return cls(x.shape[0], idx, x[idx])

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.ambient, dtype=self.values.dtype if self.values.size else float)
        x[self.support] = self.values
        return x

    @property
    def sparsity(self) -> int:
        return int(self.support.size)


@dataclass
class L0SolutionSet:
    solutions: list
    s_bound: int
    residual_tol: float
    skipped_supports: list = field(default_factory=list)

    def __len__(self):
        return len(self.solutions)

    def is_exactly(self, x, tol: float = 1e-6) -> bool:
        """True when the set holds exactly one solution and it matches ``x`` (relative l2)."""
        if len(self.solutions) != 1:
            return False
        x = np.asarray(x)
        z = self.solutions[0].to_dense()
        return np.linalg.norm(z - x) <= tol * max(np.linalg.norm(x), 1e-300)


@dataclass
class FailureWitness:
    x: SparseSignal
    v: np.ndarray
    T0: np.ndarray
    mass_T0: float
    mass_complement: float


def _require_real(*arrays):
    for a in arrays:
        if not is_real(a):
            raise FieldError("operation is only valid over the real field (complex input refused)")


def _subset_chunks(N, k):
    it = itertools.combinations(range(N), k)
    while True:
        chunk = list(itertools.islice(it, _CHUNK))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.intp).reshape(len(chunk), k)


def spark(A, size_limit: int = SPARK_SIZE_LIMIT, tol: float = DEFAULT_TOL) -> int:
    """Smallest number of linearly dependent columns (``N + 1`` if there are none)."""
    A = as_matrix(A)
    m, N = A.shape
    if N > size_limit:
        raise SizeLimit(f"spark enumeration limited to {size_limit} columns, got {N}")
    sv_max = np.linalg.norm(A, 2)
    if sv_max == 0:
        return 1
    thresh = tol * sv_max
    for k in range(1, min(m, N) + 1):
        for subsets in _subset_chunks(N, k):
            sv = np.linalg.svd(A[:, subsets].transpose(1, 0, 2), compute_uv=False)
            if np.any(sv[:, -1] <= thresh):
                return k
    return m + 1 if N > m else N + 1


def is_full_spark(A, size_limit: int = SPARK_SIZE_LIMIT) -> bool:
    A = as_matrix(A)
    m, N = A.shape
    if m > N:
        raise ValueError("full spark needs m <= N")
    return spark(A, size_limit) == m + 1


def l0_bruteforce_solutions(A, b, s: int, tol: float | None = None,
                            subset_limit: int = L0_SUBSET_LIMIT) -> L0SolutionSet:
    """All distinct solutions of ``A z = b`` with ``||z||_0 <= s``.

    Every support of size at most ``s`` is fit by least squares; a fit is
    admitted when its residual is at most ``tol`` (default
    ``1e-9 * max(1, ||b||)``) and is reported trimmed to its nonzeros.
    Rank-deficient supports are skipped and listed in ``skipped_supports``.
    """
    A = as_matrix(A)
    b = as_vector(b)
    m, N = A.shape
    if b.shape[0] != m:
        raise ValueError("length of b must equal the row count of A")
    if not 0 <= s <= N:
        raise ValueError(f"s must lie in [0, {N}]")
    total = sum(comb(N, k) for k in range(s + 1))
    if total > subset_limit:
        raise SizeLimit(f"{total} supports exceed the enumeration limit {subset_limit}")
    if tol is None:
        tol = 1e-9 * max(1.0, float(np.linalg.norm(b)))
    sv_max = np.linalg.norm(A, 2)
    dtype = np.result_type(A, b)

    found: dict[tuple, np.ndarray] = {}
    skipped = []
    if np.linalg.norm(b) <= tol:
        found[()] = np.zeros(0, dtype=dtype)
    for k in range(1, s + 1):
        for subsets in _subset_chunks(N, k):
            sub = A[:, subsets].transpose(1, 0, 2)  # (C, m, k)
            U, sv, Vh = np.linalg.svd(sub, full_matrices=False)
            ok = sv[:, -1] > DEFAULT_TOL * sv_max
            for i in np.flatnonzero(~ok):
                skipped.append(tuple(int(j) for j in subsets[i]))
            if not ok.any():
                continue
            U, sv, Vh, idx = U[ok], sv[ok], Vh[ok], subsets[ok]
            coef = np.einsum("cmk,m->ck", U.conj(), b) / sv
            z = np.einsum("ckj,ck->cj", Vh.conj(), coef)
            resid = np.linalg.norm(np.einsum("cmk,ck->cm", sub[ok], z) - b, axis=1)
            for i in np.flatnonzero(resid <= tol):
                keep = np.abs(z[i]) > NONZERO_TOL
                supp = tuple(int(j) for j in idx[i][keep])
                vals = z[i][keep]
                if supp in found:
                    continue
                found[supp] = vals

    solutions = []
    for supp in sorted(found, key=lambda t: (len(t), t)):
        vals = found[supp]
        cand = np.zeros(N, dtype=dtype)
        cand[list(supp)] = vals
        if any(np.max(np.abs(cand - sol.to_dense()), initial=0.0) <= NONZERO_TOL for sol in solutions):
            continue
        if supp:
            solutions.append(SparseSignal(N, np.array(supp), vals))
        else:
            solutions.append(SparseSignal(N, np.zeros(0, dtype=np.intp), np.zeros(0, dtype=dtype)))
    solutions.sort(key=lambda sig: tuple(sig.support))
    return L0SolutionSet(solutions, s, float(tol), skipped)


def _kernel_directions_inside(V, inside):
    """Basis of kernel coefficients ``c`` whose vector ``V c`` vanishes off ``inside``."""
    outside = V[~inside]
    if outside.shape[0] == 0:
        return np.eye(V.shape[1])
    sv_scale = max(1.0, np.linalg.norm(V, 2))
    _, sv, Vh = np.linalg.svd(outside, full_matrices=True)
    rank = int(np.count_nonzero(sv > DEFAULT_TOL * sv_scale))
    return Vh[rank:].conj().T


def _max_functional(V, inside, weights):
    """max of ``weights . (V c)[inside]`` subject to ``||(V c)[outside]||_1 <= 1``.

    Decision variables are ``c`` (free) and ``t >= |(V c)[outside]|``.
    """
    k = V.shape[1]
    Vin, Vout = V[inside], V[~inside]
    p = Vout.shape[0]
    obj = np.concatenate([-(weights @ Vin), np.zeros(p)])
    A_ub = np.block([
        [Vout, -np.eye(p)],
        [-Vout, -np.eye(p)],
        [np.zeros((1, k)), np.ones((1, p))],
    ])
    b_ub = np.concatenate([np.zeros(2 * p), [1.0]])
    bounds = [(None, None)] * k + [(0, None)] * p
    res = linprog(obj, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP failed: {res.message}")
    return -res.fun


def nsp_holds(A, T, support_limit: int = NSP_SUPPORT_LIMIT) -> bool:
    """Whether ``||v_T||_1 < ||v_{T^c}||_1`` for every nonzero ``v`` in ``ker A``."""
    A = as_matrix(A)
    _require_real(A)
    A = np.real(A)
    N = A.shape[1]
    T = as_support(T, N)
    if T.size > support_limit:
        raise SizeLimit(f"|T| = {T.size} exceeds the sign-pattern limit {support_limit}")
    V = kernel_basis(A)
    if V.shape[1] == 0:
        return True
    inside = np.zeros(N, dtype=bool)
    inside[T] = True
    if _kernel_directions_inside(V, inside).shape[1]:
        return False
    if T.size == 0:
        return True
    # sigma and -sigma give the same optimum, so fix the first sign
    for tail in itertools.product((1.0, -1.0), repeat=T.size - 1):
        sigma = np.array((1.0,) + tail)
        if _max_functional(V, inside, sigma) >= 1.0 - _LP_MARGIN:
            return False
    return True


def recovery_certificate(A, x) -> bool:
    """Whether ``x`` is the unique l1 minimizer among solutions of ``A z = A x`` (real field).

    ``x`` may be a :class:`SparseSignal` or a dense vector.
    """
    A = as_matrix(A)
    _require_real(A)
    A = np.real(A)
    N = A.shape[1]
    if not isinstance(x, SparseSignal):
        x = SparseSignal.from_dense(as_vector(x))
    if x.ambient != N:
        raise ValueError("signal length does not match A")
    _require_real(x.values)
    V = kernel_basis(A)
    if V.shape[1] == 0:
        return True
    inside = np.zeros(N, dtype=bool)
    inside[x.support] = True
    if _kernel_directions_inside(V, inside).shape[1]:
        # x + t v stays feasible with the same sign pattern: never unique
        return False
    signs = np.sign(np.real(x.values))
    if signs.size == 0:
        return True
    # |functional| is maximized by one of the two global signs
    best = max(_max_functional(V, inside, signs), _max_functional(V, inside, -signs))
    return best < 1.0 - _LP_MARGIN


def construct_bp_failure(A, s: int, seed: int, check_full_spark: bool = True) -> FailureWitness:
    """Build an ``s``-sparse signal that basis pursuit provably cannot recover.

    Takes the one-dimensional kernel of ``m + 1`` randomly chosen columns,
    keeps its ``s`` largest entries as the support ``T0`` (which then carries
    at least half the kernel vector's l1 mass since ``s > m/2``) and gives
    ``x`` the kernel vector's signs on ``T0`` with magnitudes in ``[1, 2]``.
    """
    A = as_matrix(A)
    _require_real(A)
    A = np.real(A)
    m, N = A.shape
    if not (m / 2 < s <= m):
        raise ValueError(f"need m/2 < s <= m, got m={m}, s={s}")
    if N < m + 1:
        raise ValueError("need at least m + 1 columns")
    if check_full_spark and N <= SPARK_SIZE_LIMIT and not is_full_spark(A):
        raise ValueError("construct_bp_failure needs a full-spark matrix")
    rng = np.random.Generator(np.random.Philox(key=int(seed) % 2**64))
    cols = np.sort(rng.choice(N, m + 1, replace=False))
    _, _, Vh = np.linalg.svd(A[:, cols], full_matrices=True)
    v = np.zeros(N)
    v[cols] = Vh[-1]
    # fix the sign: first largest-modulus entry positive
    v *= np.sign(v[np.argmax(np.abs(v))])
    T0 = top_s_support(v, s)
    mask = np.zeros(N, dtype=bool)
    mask[T0] = True
    mags = rng.uniform(1.0, 2.0, size=s)
    x = SparseSignal(N, T0, np.sign(v[T0]) * mags)
    return FailureWitness(
        x=x,
        v=v,
        T0=T0,
        mass_T0=float(np.abs(v[mask]).sum()),
        mass_complement=float(np.abs(v[~mask]).sum()),
    )
