"""Sparse recovery by l1 tail minimization, with basis pursuit solvers and
spark / null-space-property diagnostics."""

from .errors import FieldError, Infeasible, RankDeficient, SizeLimit, TailCSError, Unbounded
from .linalg import (
    AffineProjector,
    affine_project,
    fourier_frame,
    gaussian_matrix,
    kernel_basis,
    least_squares,
    submatrix_columns,
)
from .solvers import (
    SolverOptions,
    SolverReport,
    simplex_bp,
    soft_threshold,
    solve_weighted_l1,
    solve_weighted_l1_analysis,
)
from .tailmin import Termination, TailMinTrace, tail_l1, tail_min_analysis, tail_min_synthesis, top_s_support

__version__ = "0.1.0"
