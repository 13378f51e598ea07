"""Command-line front end.

Four verbs: ``derive`` writes a tableau, ``check`` prints its condition
report, ``run`` integrates a benchmark problem to CSV, ``order`` runs a
step-halving study.  Exit codes: 0 success, 1 usage error, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import sys

from .basis import family_from_name, make_basis
from .construction import (BUILTIN_METHODS, ConstructionError,
                           ConstructionSpec, RKNTableau, assemble, build_b,
                           builtin_tableau, discretize, serialize_tableau,
                           solve_alpha)
from .integrator import (SolverConfig, StageConvergenceError, integrate,
                         write_trajectory_csv)
from .problems import problem_from_name
from .quadrature import EigenConvergenceError, gauss_rule
from .verification import (check_discrete, empirical_order, report_csv,
                           report_lines)

USAGE_ERROR = 1
NUMERICAL_ERROR = 2


class SystemExit2(Exception):
    """Usage-level failure raised before any numerics run."""


def _add_method_arguments(parser: argparse.ArgumentParser,
                          with_stages: bool) -> None:
    parser.add_argument("--method", choices=BUILTIN_METHODS,
                        help="built-in method name")
    parser.add_argument("--gamma", type=float, default=0.0,
                        help="free parameter of the built-in families "
                        "(ignored by hermite3)")
    parser.add_argument("--family", help="polynomial family for a custom "
                        "construction (e.g. shifted-legendre)")
    parser.add_argument("--b-order", type=int, default=3,
                        help="weight condition order of a custom construction")
    parser.add_argument("--cn-order", type=int, default=2,
                        help="stage condition order of a custom construction")
    parser.add_argument("--tau-degree", type=int, default=2,
                        help="tau-degree cap of a custom construction")
    parser.add_argument("--symmetric", action="store_true",
                        help="impose time-reversal symmetry on a custom "
                        "construction")
    parser.add_argument("--set-alpha", nargs=3, action="append", default=[],
                        metavar=("I", "J", "VALUE"),
                        help="pin a coupling coefficient of a custom "
                        "construction (repeatable)")
    if with_stages:
        parser.add_argument("--stages", type=int,
                            help="Gauss points of a custom construction")


def _resolve_tableau(args) -> RKNTableau:
    if args.method is not None:
        return builtin_tableau(args.method, args.gamma)
    if args.family is None:
        raise SystemExit2("either --method or --family is required")
    family = family_from_name(args.family)
    stages = getattr(args, "stages", None)
    if stages is None:
        raise SystemExit2("--stages is required with --family")
    free_alpha = {}
    for i, j, value in args.set_alpha:
        free_alpha[(int(i), int(j))] = float(value)
    spec = ConstructionSpec(family=family, b_order=args.b_order,
                            cn_order=args.cn_order,
                            tau_degree=args.tau_degree,
                            free_alpha=free_alpha,
                            symmetric=args.symmetric)
    basis = make_basis(family, max(8, args.b_order, stages))
    coeffs = assemble(basis, build_b(basis, spec),
                      solve_alpha(basis, spec), spec=spec)
    return discretize(coeffs, gauss_rule(basis, stages))


def _cmd_derive(args) -> int:
    tableau = _resolve_tableau(args)
    text = serialize_tableau(tableau)
    if args.out:
        with open(args.out, "w", newline="\n") as stream:
            stream.write(text)
        print(f"wrote tableau to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_check(args) -> int:
    tableau = _resolve_tableau(args)
    report = check_discrete(tableau)
    label = tableau.method or (tableau.family.value if tableau.family else "?")
    print(f"method: {label} (s = {tableau.s})")
    for line in report_lines(report):
        print(line)
    if args.out:
        with open(args.out, "w", newline="\n") as stream:
            stream.write(report_csv(report))
        print(f"wrote report to {args.out}")
    return 0


def _cmd_run(args) -> int:
    tableau = _resolve_tableau(args)
    problem = problem_from_name(args.problem)
    config = SolverConfig(fp_tol=args.fp_tol, max_iters=args.max_iters,
                          record_every=args.record_every)
    trajectory = integrate(tableau, problem, args.t0, problem.q0,
                           problem.qp0, args.h, args.steps, config)
    with open(args.out, "w", newline="\n") as stream:
        write_trajectory_csv(trajectory, problem, stream)
    print(f"wrote {len(trajectory.times)} samples to {args.out} "
          f"(max stage sweeps {int(trajectory.iterations.max())})")
    return 0


def _cmd_order(args) -> int:
    tableau = _resolve_tableau(args)
    problem = problem_from_name(args.problem)
    estimate = empirical_order(tableau, problem, args.h0, args.levels,
                               t_end=args.t_end)
    print(f"{'h':>12} {'error':>14} {'slope':>8}")
    for level, (h, err) in enumerate(zip(estimate.step_sizes,
                                         estimate.errors)):
        slope = f"{estimate.slopes[level - 1]:8.3f}" if level else " " * 8
        print(f"{h:12.6g} {err:14.6e} {slope}")
    print(f"mean slope: {estimate.mean_slope:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csrkn",
        description="Derive, check and run symplectic RKN methods built "
                    "from weighted orthogonal polynomials.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_derive = sub.add_parser("derive", help="write a tableau to disk")
    _add_method_arguments(p_derive, with_stages=True)
    p_derive.add_argument("--out", help="output path (stdout when omitted)")
    p_derive.set_defaults(handler=_cmd_derive)

    p_check = sub.add_parser("check", help="print the condition report")
    _add_method_arguments(p_check, with_stages=True)
    p_check.add_argument("--out", help="also write the report as CSV")
    p_check.set_defaults(handler=_cmd_check)

    p_run = sub.add_parser("run", help="integrate a benchmark problem")
    _add_method_arguments(p_run, with_stages=True)
    p_run.add_argument("--problem", required=True)
    p_run.add_argument("--h", type=float, required=True, help="step size")
    p_run.add_argument("--steps", type=int, required=True)
    p_run.add_argument("--out", required=True, help="trajectory CSV path")
    p_run.add_argument("--t0", type=float, default=0.0)
    p_run.add_argument("--record-every", type=int, default=1)
    p_run.add_argument("--fp-tol", type=float, default=1e-14)
    p_run.add_argument("--max-iters", type=int, default=50)
    p_run.set_defaults(handler=_cmd_run)

    p_order = sub.add_parser("order", help="step-halving order study")
    _add_method_arguments(p_order, with_stages=True)
    p_order.add_argument("--problem", required=True)
    p_order.add_argument("--h0", type=float, required=True,
                         help="coarsest step size")
    p_order.add_argument("--levels", type=int, required=True)
    p_order.add_argument("--t-end", type=float, default=1.0)
    p_order.set_defaults(handler=_cmd_order)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return USAGE_ERROR if err.code else 0
    try:
        return args.handler(args)
    except (SystemExit2, ValueError, ConstructionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR
    except (StageConvergenceError, EigenConvergenceError,
            FloatingPointError, OverflowError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
