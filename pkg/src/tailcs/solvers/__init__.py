from .kernel import BACKEND
from .simplex import simplex_bp
from .splitting import (
    AnalysisProblem,
    SolverOptions,
    SolverReport,
    SynthesisProblem,
    soft_threshold,
    solve_weighted_l1,
    solve_weighted_l1_analysis,
)

__all__ = [
    "BACKEND",
    "AnalysisProblem",
    "SolverOptions",
    "SolverReport",
    "SynthesisProblem",
    "simplex_bp",
    "soft_threshold",
    "solve_weighted_l1",
    "solve_weighted_l1_analysis",
]
