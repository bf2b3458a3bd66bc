"""Command-line front end: rank, diagnose, cop and mc subcommands."""

from __future__ import annotations

import argparse
import json
import sys

from .baselines import WeightVector, ev_weights, gm_weights
from .diagnostics import cop_check, estimation_error, inconsistency_report
from .errors import (
    HreError,
    IncompleteMatrixError,
    InadmissibleSolutionError,
    NonConvergenceError,
    ParseError,
    SingularSystemError,
    SolveFailedError,
    ValidationError,
)
from .hre_solver import hre_rank
from .matrix_core import Problem, is_reachable, parse_matrix, preprocess, validate
from .min_error_solver import solve_min_error
from .montecarlo import ExperimentConfig, run_experiment, summarize, write_csv

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_SOLVER_ERROR = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # bad flags are an input problem: report on stderr, exit 1 (not argparse's 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


def _fmt(value: float) -> str:
    return format(value, ".6g")


def _load_problem(path: str) -> Problem:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_matrix(handle.read())


def _load_weights(path: str, n: int) -> WeightVector:
    values = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            cut = raw.find("#")
            text = (raw[:cut] if cut >= 0 else raw).strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ParseError(f"invalid weight '{text}'", line_no) from None
    if len(values) != n:
        raise ParseError(f"expected {n} weights, got {len(values)}", 1)
    return WeightVector(tuple(values))


def _print_fatal(report, stream=None) -> None:
    stream = stream or sys.stderr
    for issue in report.fatal_issues:
        print(f"error: {issue}", file=stream)


def _cmd_rank(args) -> int:
    problem = _load_problem(args.input)
    extra_warnings: list[str] = []
    if args.method in ("hre", "min-error") and not problem.references:
        problem = Problem(problem.matrix, {1: 1.0})
        notice = "no reference concepts given; concept 1 fixed at weight 1"
        print(f"notice: {notice}", file=sys.stderr)
        extra_warnings.append(notice)

    report = validate(problem)
    if not report.ok:
        _print_fatal(report)
        return EXIT_INPUT_ERROR

    path: str | None
    if args.method == "hre":
        outcome = hre_rank(problem, max_iterations=args.iterations, normalize=args.normalize)
        weights = outcome.weights
        path = outcome.path
        warnings = extra_warnings + list(outcome.warnings)
        error = outcome.error
    else:
        prepared, issues = preprocess(problem)
        warnings = extra_warnings + [str(i) for i in issues]
        if args.method == "ev":
            weights, path = ev_weights(problem.matrix), None
        elif args.method == "gm":
            weights, path = gm_weights(problem.matrix), None
        else:
            result = solve_min_error(problem)
            weights = result.weights_normalized if args.normalize else result.weights_raw
            path = "min-error"
            if not result.verified_minimum:
                warnings.append("least-squares stationary point not verified as a minimum")
        _, error = estimation_error(prepared, weights)

    indices = inconsistency_report(problem.matrix)
    if args.json:
        payload = {
            "method": args.method,
            "path": path,
            "weights": list(weights.values),
            "normalized": weights.normalized,
            "diagnostics": {
                "ci": indices.saaty_ci,
                "koczkodaj": indices.koczkodaj,
                "error": error,
            },
            "warnings": warnings,
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"method: {args.method}")
        print(f"path: {path if path is not None else 'n/a'}")
        print("weights (normalized):" if weights.normalized else "weights:")
        for i, value in enumerate(weights.values, start=1):
            print(f"  c{i}  {_fmt(value)}")
        print(f"CI: {_fmt(indices.saaty_ci) if indices.saaty_ci is not None else 'n/a'}")
        print(f"K: {_fmt(indices.koczkodaj) if indices.koczkodaj is not None else 'n/a'}")
        print(f"estimation error: {_fmt(error)}")
        if warnings:
            print("warnings:")
            for w in warnings:
                print(f"  - {w}")
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    problem = _load_problem(args.input)
    report = validate(problem)
    fatal = not report.ok

    matrix = problem.matrix
    complete = matrix.is_complete()
    reciprocity_warnings = [i for i in report.issues if i.category == "non-reciprocal-pair"]
    indices = inconsistency_report(matrix) if not fatal else None
    if problem.references:
        reachable, unreachable = is_reachable(problem)
    else:
        reachable, unreachable = None, ()

    if args.json:
        payload = {
            "n": matrix.n,
            "complete": complete,
            "reciprocal": not reciprocity_warnings,
            "ci": indices.saaty_ci if indices else None,
            "koczkodaj": indices.koczkodaj if indices else None,
            "triads_evaluated": indices.triads_evaluated if indices else 0,
            "reachable": reachable,
            "unreachable": list(unreachable),
            "issues": [str(i) for i in report.issues],
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"n: {matrix.n}")
        print(f"complete: {'yes' if complete else 'no'}")
        print(f"reciprocal: {'yes' if not reciprocity_warnings else 'no'}")
        if indices and indices.saaty_ci is not None:
            print(f"CI: {_fmt(indices.saaty_ci)}")
        else:
            print("CI: n/a")
        if indices and indices.koczkodaj is not None:
            print(f"K: {_fmt(indices.koczkodaj)} (triads evaluated: {indices.triads_evaluated})")
        else:
            print(f"K: n/a (triads evaluated: {indices.triads_evaluated if indices else 0})")
        if reachable is None:
            print("reachability: n/a (no reference concepts)")
        elif reachable:
            print("reachability: ok")
        else:
            print(f"reachability: unreachable concepts: {', '.join(f'c{i}' for i in unreachable)}")
        if report.issues:
            print("issues:")
            for issue in report.issues:
                print(f"  - {issue}")
    return EXIT_INPUT_ERROR if fatal else EXIT_OK


def _cmd_cop(args) -> int:
    problem = _load_problem(args.input)
    weights = _load_weights(args.weights, problem.n)
    result = cop_check(problem.matrix, weights)

    if args.json:
        payload = {
            "satisfies_cop": result.satisfies_cop,
            "quadruples_checked": result.quadruples_checked,
            "pop_violations": [
                {"quadruple": list(v.quadruple), "failed_pairs": [list(p) for p in v.failed_pairs]}
                for v in result.pop_violations
            ],
            "poip_violations": [
                {"quadruple": list(v.quadruple), "lhs": v.lhs, "rhs": v.rhs}
                for v in result.poip_violations
            ],
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"quadruples checked: {result.quadruples_checked}")
        if result.pop_violations:
            print("POP violations:")
            for v in result.pop_violations:
                i, j, k, l = v.quadruple
                broken = ", ".join(f"mu(c{a}) <= mu(c{b})" for a, b in v.failed_pairs)
                print(f"  - ({i},{j}) vs ({k},{l}): {broken}")
        else:
            print("POP violations: none")
        if result.poip_violations:
            print("POIP violations:")
            for v in result.poip_violations:
                i, j, k, l = v.quadruple
                print(
                    f"  - ({i},{j}) vs ({k},{l}): "
                    f"mu(c{i})/mu(c{j}) = {_fmt(v.lhs)} <= mu(c{k})/mu(c{l}) = {_fmt(v.rhs)}"
                )
        else:
            print("POIP violations: none")
        print(f"satisfies COP: {'yes' if result.satisfies_cop else 'no'}")
    return EXIT_OK


def _cmd_mc(args) -> int:
    noise_levels = tuple(float(part) for part in args.noise.split(",") if part != "")
    config = ExperimentConfig(
        n=args.n,
        trials=args.trials,
        noise_levels=noise_levels,
        reference_count=args.refs,
        seed=args.seed,
    )
    records = run_experiment(config)
    write_csv(records, args.out)
    for s in summarize(records):
        print(
            f"noise {s.noise_level:g}: solved {s.solved}/{s.trials}, "
            f"mean K {_fmt(s.mean_koczkodaj)}, mean distance {_fmt(s.mean_distance)}"
        )
    print(f"results written to {args.out}", file=sys.stderr)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hrerank", description="Priority weights from pairwise comparisons")
    sub = parser.add_subparsers(dest="command", required=True)

    rank = sub.add_parser("rank", help="derive a weight vector")
    rank.add_argument("--input", required=True, help="matrix file")
    rank.add_argument("--method", required=True, choices=["hre", "ev", "gm", "min-error"])
    rank.add_argument("--iterations", type=int, default=10, help="fallback iteration budget")
    rank.add_argument("--normalize", action="store_true", help="rescale weights to sum 1")
    rank.add_argument("--json", action="store_true")
    rank.set_defaults(func=_cmd_rank)

    diagnose = sub.add_parser("diagnose", help="inconsistency and structure report")
    diagnose.add_argument("--input", required=True)
    diagnose.add_argument("--json", action="store_true")
    diagnose.set_defaults(func=_cmd_diagnose)

    cop = sub.add_parser("cop", help="check order preservation of a weight vector")
    cop.add_argument("--input", required=True)
    cop.add_argument("--weights", required=True, help="file with one weight per line")
    cop.add_argument("--json", action="store_true")
    cop.set_defaults(func=_cmd_cop)

    mc = sub.add_parser("mc", help="noise-vs-divergence experiment")
    mc.add_argument("--n", type=int, required=True)
    mc.add_argument("--trials", type=int, required=True)
    mc.add_argument("--noise", required=True, help="comma-separated noise levels")
    mc.add_argument("--refs", type=int, required=True)
    mc.add_argument("--seed", type=int, required=True)
    mc.add_argument("--out", required=True, help="CSV output path")
    mc.set_defaults(func=_cmd_mc)
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError:
        return EXIT_INPUT_ERROR
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ValidationError as exc:
        _print_fatal(exc.report)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (
        IncompleteMatrixError,
        SingularSystemError,
        InadmissibleSolutionError,
        NonConvergenceError,
        SolveFailedError,
    ) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER_ERROR
    except HreError as exc:  # pragma: no cover - defensive catch-all
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER_ERROR


if __name__ == "__main__":
    sys.exit(main())
