"""
Command-line entry point.

    certinum run PROGRAM --args "f=x^2-2, a=1, b=1.5, tol=0.0001"
    certinum check SPECFILE
    certinum derive --expr "sin(x)" --order 4 --at 0.5
    certinum taylor --expr "exp(x)" --order 2 --at 0 --probe --max-exponent 40
    certinum bisect --f "x^2 - 2" --a 1 --b 1.5 --tol 1e-4
    certinum fpm --f "(3/x + x)/2" --x0 1 --tol 0.001 --max-iter 10 --certify quadratic --r 1.7320508075688772

Every invocation prints a header record echoing seed and budget. Human
output prints numbers with 17 significant digits; --json prints one JSON
object per line. Logging goes to stderr.

Exit codes: 0 success or pass, 1 violation or method precondition failure,
2 usage, parse or uncheckable-triple errors.
"""

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .config import get_settings, load_settings, use_settings
from .errors import ArgumentError, EvalError, MethodPreconditionError, ParseError, UncheckableTripleError
from .interp import Terminated, BudgetExhausted, run
from .lang.parser import parse_expr, parse_program
from .lang.printer import show
from .lang.values import Nat, Real, to_python

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


# =============================================================================
# Output
# =============================================================================

def _human(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_human(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}={_human(v)}" for k, v in value.items()) + "}"
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


class Output:
    """Line-oriented records: `kind: k=v, ...` for people, JSON objects otherwise."""

    def __init__(self, as_json: bool, stream: Optional[TextIO] = None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def record(self, label: str, /, **fields):
        if self.as_json:
            line = json.dumps({"record": label, **_jsonable(fields)}, ensure_ascii=False)
        else:
            line = f"{label}: " + ", ".join(f"{k}={_human(v)}" for k, v in fields.items())
        print(line, file=self.stream)


def _trace_records(out: Output, trace):
    for event in trace:
        out.record("event", **event.to_record())


# =============================================================================
# Subcommands
# =============================================================================

def _load_program_file(path: str):
    p = Path(path)
    if not p.exists():
        raise ParseError(f"no such program file: {path}")
    return parse_program(p.read_text(encoding="utf-8"))


def cmd_run(args, out: Output) -> int:
    from .hoare.specfile import parse_arguments
    program = _load_program_file(args.program)
    arguments = parse_arguments(args.args or "", program)
    budget = get_settings().budget
    outcome = run(program, arguments, budget)
    if args.trace:
        _trace_records(out, outcome.trace)
    if isinstance(outcome, Terminated):
        final = outcome.state.vars
        fields = {}
        # bracketing programs also report the midpoint of their final bracket
        if isinstance(final.get("lower"), (Real, Nat)) and isinstance(final.get("upper"), (Real, Nat)):
            fields["root"] = (final["lower"].value + final["upper"].value) / 2
        out.record("result", program=program.name, status="terminated", steps=outcome.steps,
                   vars={k: to_python(v) for k, v in final.items()}, **fields)
        return EXIT_OK
    if isinstance(outcome, BudgetExhausted):
        out.record("result", program=program.name, status="budget-exhausted", steps=outcome.steps)
    else:
        out.record("result", program=program.name, status="runtime-error", steps=outcome.steps,
                   message=outcome.message)
    return EXIT_FAIL


def cmd_check(args, out: Output) -> int:
    from .hoare.checker import check_triple
    from .hoare.specfile import load_spec
    spec = load_spec(args.spec)
    if args.seed is not None:
        spec.plan.seed = args.seed
    if args.samples is not None:
        spec.plan.count = args.samples
    report = check_triple(spec.triple, spec.plan, workers=args.workers)
    for verdict in report.counterexamples:
        out.record("counterexample", **verdict.to_record())
        if args.trace:
            _trace_records(out, verdict.trace)
    out.record("report", **report.to_record())
    if report.empty_evidence:
        return EXIT_USAGE
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_derive(args, out: Output) -> int:
    from .calculus.jet import jet_eval
    from .calculus.finite_diff import nth_derivative_fd
    e = parse_expr(args.expr)
    jet = jet_eval(e, args.var, args.at, args.order)
    fields = dict(expr=show(e), var=args.var, at=args.at, order=args.order,
                  coefficients=jet.floats(),
                  derivatives=[jet.derivative(m) for m in range(args.order + 1)],
                  nth=jet.derivative(args.order))
    if args.fd:
        fields["finite_difference"] = nth_derivative_fd(e, args.order, args.at, var=args.var)
    out.record("derivative", **fields)
    return EXIT_OK


def cmd_taylor(args, out: Output) -> int:
    from .calculus.taylor import peano_limit_probe, peano_remainder, taylor_limit_probe, taylor_poly
    e = parse_expr(args.expr)
    if args.probe:
        probe = taylor_limit_probe if args.limit else peano_limit_probe
        diff = get_settings().diff
        if args.max_exponent is not None:
            diff = replace(diff, probe_max_exponent=args.max_exponent)
        report = probe(e, args.var, args.order, args.at, radii=diff.probe_radii(args.at), threshold=args.threshold)
        for radius, worst in zip(report.radii, report.maxima):
            out.record("decay", radius=radius, max_abs=worst)
        out.record("probe", **report.to_record())
        return EXIT_OK if report.passed else EXIT_FAIL

    poly = taylor_poly(e, args.var, args.at, args.order)
    fields = dict(expr=show(e), center=args.at, degree=poly.degree, coefficients=list(poly.coeffs),
                  polynomial=show(poly.to_expr(args.var)))
    if args.x is not None:
        fields["x"] = args.x
        fields["peano_remainder"] = peano_remainder(e, args.var, args.order, args.at, args.x,
                                                    dps=get_settings().dps)
    out.record("taylor", **fields)
    return EXIT_OK


def cmd_bisect(args, out: Output) -> int:
    from .methods.bisection import bisect
    result = bisect(parse_expr(args.f), args.a, args.b, args.tol, var=args.var)
    if args.trace:
        for step in result.history:
            out.record("step", iter=step.iter, lower=step.lower, upper=step.upper,
                       xmid=step.xmid, ymid=step.ymid)
    out.record("bisection", **result.to_record())
    return EXIT_OK


def cmd_fpm(args, out: Output) -> int:
    from .methods.fixed_point import fixed_point, contraction_estimate
    from .methods.certificates import certify, CertificateKind
    f = parse_expr(args.f)
    result = fixed_point(f, args.x0, args.tol, args.max_iter, var=args.var)
    if args.trace:
        for n, x in enumerate(result.trajectory):
            out.record("iterate", n=n, x=x)
    out.record("fixed_point", **result.to_record())
    if not args.certify:
        return EXIT_OK

    c = args.c
    if CertificateKind(args.certify) is CertificateKind.LINEAR and c is None:
        r = args.r if args.r is not None else result.x
        delta = args.delta or 1.5 * abs(args.x0 - r) or 1.0
        c = contraction_estimate(f, r, delta, seed=get_settings().seed, var=args.var)
        logger.info(f"estimated contraction constant c={c!r} on |x - {r!r}| < {delta!r}")
    cert = certify(args.certify, f, args.r, run=result, c=c, tol=args.tol, max_iter=args.max_iter, var=args.var)
    record = cert.to_record()
    entries = record.pop("entries")
    if args.trace:
        for entry in entries:
            out.record("entry", **entry)
    out.record("certificate", entries=len(entries), failures=len(cert.failures), **record)
    return EXIT_OK if cert.holds else EXIT_FAIL


# =============================================================================
# Argument parsing
# =============================================================================

def _int(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=_int, default=None, help="Interpreter step budget (default: 1000000)")
    common.add_argument("--seed", type=_int, default=None, help="Sampling seed (default: 0xC0FFEE)")
    common.add_argument("--trace", action="store_true", help="Print trace / history records")
    common.add_argument("--json", action="store_true", help="One JSON object per line")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG on stderr")
    common.add_argument("--config", default=None, help="Settings YAML (default: data/defaults.yaml)")

    parser = argparse.ArgumentParser(prog="certinum", description="Runtime-checked numerical programs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="Run a program file")
    p.add_argument("program", help="Program file")
    p.add_argument("--args", default="", help='Arguments as "name=value, ..."')
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("check", parents=[common], help="Check a triple from a spec file")
    p.add_argument("spec", help="Spec file")
    p.add_argument("--samples", type=int, default=None, help="Seeded samples (default: from the spec file)")
    p.add_argument("--workers", type=int, default=None, help="Threads checking samples")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("derive", parents=[common], help="Jet coefficients and n-th derivative")
    p.add_argument("--expr", required=True)
    p.add_argument("--var", default="x")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--at", type=float, required=True)
    p.add_argument("--fd", action="store_true", help="Also print the finite-difference estimate")
    p.set_defaults(handler=cmd_derive)

    p = sub.add_parser("taylor", parents=[common], help="Taylor polynomial, remainder and limit probes")
    p.add_argument("--expr", required=True)
    p.add_argument("--var", default="x")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--at", type=float, default=0.0, help="Expansion point c")
    p.add_argument("--x", type=float, default=None, help="Evaluate the Peano remainder here")
    p.add_argument("--probe", action="store_true", help="Run the Peano limit probe")
    p.add_argument("--limit", action="store_true", help="With --probe: probe the limit form instead")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--max-exponent", type=int, default=None, help="With --probe: smallest radius is 2^-N (default: from settings)")
    p.set_defaults(handler=cmd_taylor)

    p = sub.add_parser("bisect", parents=[common], help="Native bisection")
    p.add_argument("--f", required=True)
    p.add_argument("--var", default="x")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--tol", type=float, required=True)
    p.set_defaults(handler=cmd_bisect)

    p = sub.add_parser("fpm", parents=[common], help="Native fixed-point iteration")
    p.add_argument("--f", required=True)
    p.add_argument("--var", default="x")
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--max-iter", type=int, required=True)
    p.add_argument("--certify", choices=["linear", "c1", "quadratic"], default=None)
    p.add_argument("--r", type=float, default=None, help="Fixed point (default: refined by the oracle)")
    p.add_argument("--c", type=float, default=None, help="Contraction constant for a linear certificate")
    p.add_argument("--delta", type=float, default=None, help="Ball radius for estimating c")
    p.set_defaults(handler=cmd_fpm)

    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse flags, run one subcommand, return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    _configure_logging(args.verbose)
    out = Output(args.json)
    try:
        settings = load_settings(args.config)
        settings = use_settings(settings.with_overrides(budget=args.budget, seed=args.seed))
        out.record("certinum", command=args.command, seed=settings.seed, budget=settings.budget)
        return args.handler(args, out)
    except (ParseError, UncheckableTripleError, ArgumentError) as e:
        print(f"certinum: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (MethodPreconditionError, EvalError) as e:
        print(f"certinum: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, OSError) as e:
        print(f"certinum: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
