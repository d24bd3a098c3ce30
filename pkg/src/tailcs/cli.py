"""Command-line front end (``tailcs``).

Exit status: 0 on success, 2 on argument errors, 1 on computational
failures (the error tag is printed to stderr).
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import diagnostics as diag
from .errors import TailCSError
from .experiments import Method, TrialSpec, derive_seed, sweep_sparsity
from .linalg import fourier_frame, gaussian_matrix
from .matio import format_matrix, read_matrix, read_vector, write_matrix
from .solvers import SolverOptions, simplex_bp
from .solvers.splitting import AnalysisProblem, SynthesisProblem
from .svg import success_curves_svg
from .tailmin import tail_min_analysis, tail_min_synthesis


class ArgumentError(ValueError):
    pass


def _num(v) -> str:
    return repr(float(v))


def _index_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _s_range(text: str) -> list[int]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [int(parts[0])]
        if len(parts) == 3:
            lo, hi, step = (int(p) for p in parts)
            if step <= 0 or hi < lo or lo < 1:
                raise ValueError
            return list(range(lo, hi + 1, step))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected LO:HI:STEP with 1 <= LO <= HI and STEP > 0, got {text!r}")


def _method_list(text: str) -> list[Method]:
    try:
        return [Method.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tailcs", description="Sparse recovery by l1 tail minimization.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-matrix", help="write a Gaussian or Fourier-frame matrix")
    g.add_argument("--kind", choices=["gaussian", "fourier"], required=True)
    g.add_argument("--m", type=_positive_int, required=True, help="rows")
    g.add_argument("--N", type=_positive_int, required=True, help="columns")
    g.add_argument("--d", type=_positive_int, help="rows of a Fourier frame (defaults to --m)")
    g.add_argument("--seed", type=int, help="RNG seed (required for gaussian)")
    g.add_argument("--out", required=True, metavar="PATH")

    s = sub.add_parser("solve", help="basis pursuit, weighted l1 or l1-analysis solve")
    s.add_argument("--method", choices=["bp", "weighted", "analysis"], required=True)
    s.add_argument("--input", required=True, metavar="A.mat")
    s.add_argument("--b", required=True, metavar="b.vec")
    s.add_argument("--dict", metavar="D.mat")
    s.add_argument("--weights", metavar="w.vec")
    s.add_argument("--tol", type=float, default=1e-8)

    t = sub.add_parser("tailmin", help="iterative tail minimization")
    t.add_argument("--input", required=True, metavar="A.mat")
    t.add_argument("--b", required=True, metavar="b.vec")
    t.add_argument("--s", type=_positive_int, required=True)
    t.add_argument("--dict", metavar="D.mat")
    t.add_argument("--eps-outer", type=float, default=1e-8)
    t.add_argument("--max-outer", type=_positive_int, default=50)
    t.add_argument("--trace", metavar="PATH", help="write the iteration trace as JSON")

    d = sub.add_parser("diagnose", help="spark, NSP, certificate and l0 oracles")
    d.add_argument("kind", choices=["spark", "full-spark", "nsp", "certificate", "l0"])
    d.add_argument("--input", required=True, metavar="A.mat")
    d.add_argument("--T", type=_index_list, help="support, e.g. 0,3,5")
    d.add_argument("--x", metavar="x.vec")
    d.add_argument("--b", metavar="b.vec")
    d.add_argument("--s", type=int)

    f = sub.add_parser("failure-demo", help="construct a basis pursuit failure and check it")
    f.add_argument("--m", type=_positive_int, required=True)
    f.add_argument("--N", type=_positive_int, required=True)
    f.add_argument("--s", type=_positive_int, required=True)
    f.add_argument("--seed", type=int, required=True)

    w = sub.add_parser("sweep", help="Monte Carlo success rates over a sparsity range")
    w.add_argument("--m", type=_positive_int, required=True)
    w.add_argument("--N", type=_positive_int, required=True)
    w.add_argument("--dict-d", type=_positive_int)
    w.add_argument("--dict-N", type=_positive_int)
    w.add_argument("--s", type=_s_range, required=True, metavar="LO:HI:STEP")
    w.add_argument("--methods", type=_method_list, required=True, metavar="LIST",
                   help="comma-separated: bp,tailmin,analysis,tailanalysis,l0")
    w.add_argument("--trials", type=int, required=True)
    w.add_argument("--seed", type=int, required=True)
    w.add_argument("--out", required=True, metavar="PATH")
    w.add_argument("--fixed-matrix", action="store_true", help="one sensing matrix for all trials")
    w.add_argument("--svg", metavar="PATH")
    w.add_argument("--json", metavar="PATH", help="write raw trial records")
    w.add_argument("--timing", action="store_true",
                   help="record wall times in the CSV (output is then not byte-reproducible)")
    return p


def _print_report(report, out):
    out.write(f"objective {_num(report.objective)}\n")
    out.write(f"converged {str(report.converged).lower()}\n")
    out.write(f"iterations {report.iterations}\n")
    out.write(f"primal_residual {_num(report.primal_residual)}\n")
    out.write(f"dual_residual {_num(report.dual_residual)}\n")
    out.write(format_matrix(report.solution))


def _cmd_gen_matrix(a, out):
    if a.kind == "gaussian":
        if a.seed is None:
            raise ArgumentError("--seed is required for --kind gaussian")
        A = gaussian_matrix(a.m, a.N, a.seed)
    else:
        A = fourier_frame(a.d or a.m, a.N)
    write_matrix(a.out, A)


def _cmd_solve(a, out):
    A = read_matrix(a.input)
    b = read_vector(a.b)
    opts = SolverOptions(abs_tol=a.tol, rel_tol=a.tol)
    if a.method == "analysis":
        if a.dict is None:
            raise ArgumentError("--method analysis needs --dict")
        D = read_matrix(a.dict)
        w = read_vector(a.weights).real if a.weights else np.ones(D.shape[1])
        report = AnalysisProblem(A, D, b).solve(w, opts)
    else:
        if a.dict is not None:
            raise ArgumentError("--dict is only valid with --method analysis")
        if a.method == "weighted":
            if a.weights is None:
                raise ArgumentError("--method weighted needs --weights")
            w = read_vector(a.weights).real
        else:
            if a.weights is not None:
                raise ArgumentError("--method bp takes no --weights")
            w = np.ones(A.shape[1])
        report = SynthesisProblem(A, b).solve(w, opts)
    _print_report(report, out)


def _cmd_tailmin(a, out):
    A = read_matrix(a.input)
    b = read_vector(a.b)
    if a.dict:
        report, trace = tail_min_analysis(A, read_matrix(a.dict), b, a.s,
                                          eps_outer=a.eps_outer, max_outer=a.max_outer)
    else:
        report, trace = tail_min_synthesis(A, b, a.s, eps_outer=a.eps_outer, max_outer=a.max_outer)
    if a.trace:
        with open(a.trace, "w", encoding="utf-8") as fh:
            json.dump(trace.to_dict(), fh, indent=1)
            fh.write("\n")
    out.write(f"terminated_by {trace.terminated_by.value}\n")
    out.write(f"outer_iterations {trace.outer_iterations}\n")
    _print_report(report, out)


def _cmd_diagnose(a, out):
    A = read_matrix(a.input)
    if a.kind == "spark":
        out.write(f"{diag.spark(A)}\n")
    elif a.kind == "full-spark":
        out.write(f"{str(diag.is_full_spark(A)).lower()}\n")
    elif a.kind == "nsp":
        if a.T is None:
            raise ArgumentError("diagnose nsp needs --T")
        out.write(f"{str(diag.nsp_holds(A, a.T)).lower()}\n")
    elif a.kind == "certificate":
        if a.x is None:
            raise ArgumentError("diagnose certificate needs --x")
        out.write(f"{str(diag.recovery_certificate(A, read_vector(a.x))).lower()}\n")
    else:
        if a.b is None or a.s is None:
            raise ArgumentError("diagnose l0 needs --b and --s")
        sols = diag.l0_bruteforce_solutions(A, read_vector(a.b), a.s)
        out.write(f"solutions {len(sols)}\n")
        for sig in sols.solutions:
            supp = ",".join(str(i) for i in sig.support)
            out.write(f"support {supp or '-'}\n")
            out.write(format_matrix(sig.values if sig.values.size else np.zeros(1)))


def _cmd_failure_demo(a, out):
    A = gaussian_matrix(a.m, a.N, derive_seed(a.seed, 0))
    wit = diag.construct_bp_failure(A, a.s, derive_seed(a.seed, 1))
    x = wit.x.to_dense()
    bp = simplex_bp(A, A @ x)
    rel = np.linalg.norm(bp.solution - x) / np.linalg.norm(x)
    out.write(f"T0 {','.join(str(i) for i in wit.T0)}\n")
    out.write(f"mass_T0 {_num(wit.mass_T0)}\n")
    out.write(f"mass_complement {_num(wit.mass_complement)}\n")
    out.write(f"mass_ratio {_num(wit.mass_T0 / wit.mass_complement)}\n")
    out.write(f"certificate {str(diag.recovery_certificate(A, wit.x)).lower()}\n")
    out.write(f"x_l1 {_num(np.abs(x).sum())}\n")
    out.write(f"bp_l1 {_num(bp.objective)}\n")
    out.write(f"bp_relative_error {_num(rel)}\n")


def _cmd_sweep(a, out):
    if (a.dict_d is None) != (a.dict_N is None):
        raise ArgumentError("--dict-d and --dict-N go together")
    dictionary = (a.dict_d, a.dict_N) if a.dict_d else None
    if a.trials < 0:
        raise ArgumentError("--trials must be >= 0")
    base = TrialSpec(m=a.m, N=a.N, s=a.s[0], method=a.methods[0], seed=a.seed, dictionary=dictionary)
    for s in a.s:  # validate every cell before computing
        for method in a.methods:
            TrialSpec(m=a.m, N=a.N, s=s, method=method, seed=a.seed, dictionary=dictionary)
    table = sweep_sparsity(base, a.s, a.methods, a.trials, fixed_matrix=a.fixed_matrix)
    with open(a.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(table.to_csv(include_timing=a.timing))
    if a.svg:
        title = f"A {a.m}x{a.N}" + (f", D {a.dict_d}x{a.dict_N}" if dictionary else "")
        with open(a.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(success_curves_svg(table, title))
    if a.json:
        with open(a.json, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(table.records_json())
            fh.write("\n")
    for row in table.rows:
        out.write(f"s={row.s} {row.method.value} {row.successes}/{row.trials}\n")


COMMANDS = {
    "gen-matrix": _cmd_gen_matrix,
    "solve": _cmd_solve,
    "tailmin": _cmd_tailmin,
    "diagnose": _cmd_diagnose,
    "failure-demo": _cmd_failure_demo,
    "sweep": _cmd_sweep,
}


def run_command(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, out)
    except TailCSError as exc:
        err.write(f"error: {exc.tag}: {exc}\n")
        return 1
    except (ValueError, OSError) as exc:
        parser.print_usage(err)
        err.write(f"tailcs: error: {exc}\n")
        return 2
    return 0


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
