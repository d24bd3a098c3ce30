import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tailcs.diagnostics import l0_bruteforce_solutions
from tailcs.linalg import fourier_frame, gaussian_matrix
from tailcs.solvers import SolverOptions, solve_weighted_l1
from tailcs.tailmin import (
    Termination,
    tail_l1,
    tail_min_analysis,
    tail_min_synthesis,
    top_s_support,
)


def test_top_s_support_examples():
    assert top_s_support([0.5, -2, 0, 1], 2).tolist() == [1, 3]
    assert top_s_support([1, 1, 1], 2).tolist() == [0, 1]
    assert top_s_support([3, 1, 2], 3).tolist() == [0, 1, 2]
    assert top_s_support([1j, -2, 0.5], 1).tolist() == [1]


@pytest.mark.parametrize("s", [0, 4])
def test_top_s_support_range(s):
    with pytest.raises(ValueError):
        top_s_support([1, 2, 3], s)


def test_tail_l1_examples():
    assert tail_l1([3, -2, 1], 2) == 1
    assert tail_l1([0, 5, 0, -1], 2) == 0
    assert tail_l1([0, 5, 0, -1], 4) == 0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30), st.data())
def test_tail_l1_sort_oracle(xs, data):
    x = np.array(xs)
    s = data.draw(st.integers(0, len(xs)))
    mags = sorted((abs(v) for v in xs), reverse=True)
    expected = sum(abs(v) for v in xs) - sum(mags[:s])
    assert tail_l1(x, s) == pytest.approx(expected, abs=1e-9 * (1 + sum(mags)))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=20), st.data())
def test_top_s_support_is_maximal_and_sorted(xs, data):
    x = np.array(xs, dtype=float)
    s = data.draw(st.integers(1, len(xs)))
    T = top_s_support(x, s)
    assert len(T) == s and np.all(np.diff(T) > 0)
    rest = np.setdiff1d(np.arange(len(xs)), T)
    if rest.size:
        assert np.min(np.abs(x[T])) >= np.max(np.abs(x[rest]))
        # ties resolved toward smaller indices
        cut = np.min(np.abs(x[T]))
        tied_in = T[np.abs(x[T]) == cut]
        tied_out = rest[np.abs(x[rest]) == cut]
        if tied_out.size:
            assert tied_in.max() < tied_out.min()


def test_toy_reaches_zero_tail(toy):
    A, b = toy
    rep, trace = tail_min_synthesis(A, b, 2)
    x = rep.solution
    np.testing.assert_allclose(A @ x, b, atol=1e-8)
    assert tail_l1(x, 2) <= 1e-8
    # both documented terminal points are 2-sparse feasible points
    ok = [np.array([0, 0, 1.0]), np.array([1, 1, 0.0])]
    assert any(np.allclose(x, o, atol=1e-8) for o in ok)
    assert trace.terminated_by is Termination.CONVERGED


def test_fixed_point_when_bp_is_exact():
    A = gaussian_matrix(10, 20, 3)
    x = np.zeros(20)
    x[[2, 11]] = [1.0, -0.7]
    rep, trace = tail_min_synthesis(A, A @ x, 2)
    assert trace.terminated_by is Termination.CONVERGED
    assert trace.outer_iterations == 2
    np.testing.assert_allclose(trace.iterates[1], trace.iterates[0], atol=1e-8)
    np.testing.assert_allclose(rep.solution, x, atol=1e-8)


def test_s_range_is_checked(toy):
    A, b = toy
    with pytest.raises(ValueError):
        tail_min_synthesis(A, b, 3)
    with pytest.raises(ValueError):
        tail_min_synthesis(A, b, 0)


@pytest.mark.parametrize("seed", range(8))
def test_trace_invariants(seed):
    rng = np.random.default_rng(seed)
    A = gaussian_matrix(12, 24, seed)
    x = np.zeros(24)
    x[rng.choice(24, 7, replace=False)] = rng.standard_normal(7)
    eps = 1e-8
    rep, trace = tail_min_synthesis(A, A @ x, 7, eps_outer=eps)
    assert trace.iterates
    assert all(len(T) == 7 for T in trace.supports)
    assert len(trace.supports) == trace.outer_iterations - 1
    if trace.terminated_by is Termination.CONVERGED:
        assert np.linalg.norm(trace.iterates[-1] - trace.iterates[-2]) < eps
        # the final subproblem objective is the tail of the final iterate
        assert rep.objective == pytest.approx(tail_l1(rep.solution, 7), abs=1e-6 * (1 + np.abs(x).sum()))


def test_deterministic_trace():
    A = gaussian_matrix(8, 16, 7)
    rng = np.random.default_rng(1)
    x = np.zeros(16)
    x[rng.choice(16, 5, replace=False)] = rng.standard_normal(5)
    _, t1 = tail_min_synthesis(A, A @ x, 5)
    _, t2 = tail_min_synthesis(A, A @ x, 5)
    assert t1.to_dict() == t2.to_dict()


def test_max_outer_cap():
    A = gaussian_matrix(8, 16, 9)
    rng = np.random.default_rng(9)
    x = np.zeros(16)
    x[rng.choice(16, 6, replace=False)] = rng.standard_normal(6)
    _, trace = tail_min_synthesis(A, A @ x, 6, max_outer=1)
    assert trace.outer_iterations == 1
    assert trace.terminated_by is Termination.MAX_ITER


@pytest.mark.parametrize("seed", range(10))
def test_oracle_support_exact_recovery(seed):
    rng = np.random.default_rng(seed)
    A = gaussian_matrix(8, 16, 500 + seed)
    T = rng.choice(16, 6, replace=False)
    x = np.zeros(16)
    x[T] = rng.standard_normal(6)
    w = np.ones(16)
    w[T] = 0
    rep = solve_weighted_l1(A, A @ x, w)
    assert np.linalg.norm(rep.solution - x) < 1e-8 * np.linalg.norm(x)


def test_gaussian_8x12_s5_monte_carlo():
    # l0 uniqueness must hold on every draw; tail minimization is compared to
    # basis pursuit on the same instances
    n_seeds = 40
    tm_ok = bp_ok = 0
    for seed in range(n_seeds):
        rng = np.random.default_rng(seed)
        A = gaussian_matrix(8, 12, 1000 + seed)
        x = np.zeros(12)
        x[rng.choice(12, 5, replace=False)] = rng.standard_normal(5)
        b = A @ x
        sols = l0_bruteforce_solutions(A, b, 5)
        assert len(sols.solutions) == 1 and sols.is_exactly(x, 1e-8)
        rep, _ = tail_min_synthesis(A, b, 5)
        tm_ok += np.linalg.norm(rep.solution - x) < 1e-6 * np.linalg.norm(x)
        bp = solve_weighted_l1(A, b, np.ones(12))
        bp_ok += np.linalg.norm(bp.solution - x) < 1e-6 * np.linalg.norm(x)
        if tail_l1(rep.solution, 5) < 1e-9:
            # a 5-sparse feasible point must be the unique one
            np.testing.assert_allclose(rep.solution, x, atol=1e-6)
    assert tm_ok >= bp_ok


def test_analysis_identity_matches_synthesis():
    rng = np.random.default_rng(4)
    A = gaussian_matrix(8, 16, 44)
    x = np.zeros(16)
    x[rng.choice(16, 5, replace=False)] = rng.standard_normal(5)
    b = A @ x
    rs, ts = tail_min_synthesis(A, b, 5)
    ra, ta = tail_min_analysis(A, np.eye(16), b, 5)
    assert [T.tolist() for T in ts.supports] == [T.tolist() for T in ta.supports]
    np.testing.assert_allclose(ra.solution, rs.solution, atol=1e-6)


def test_analysis_zero_rhs():
    A = gaussian_matrix(4, 8, 1)
    rep, trace = tail_min_analysis(A, fourier_frame(8, 16), np.zeros(4), 3)
    np.testing.assert_allclose(trace.iterates[0], 0, atol=1e-14)
    np.testing.assert_allclose(rep.solution, 0, atol=1e-14)


def test_analysis_checks_shapes():
    with pytest.raises(ValueError):
        tail_min_analysis(np.eye(3), np.eye(4), np.ones(3), 1)
