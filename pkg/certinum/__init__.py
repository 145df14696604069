"""
certinum: guarded-command numerical programs with runtime-checked
Hoare triples, a jet differentiation engine and convergence certificates.

Core modules:
- lang: program notation (AST, parser, evaluator, well-formedness)
- interp: step-budgeted interpreter with traces
- hoare: triples, sample plans, trace audits
- calculus: jets, finite differences, Taylor tools
- methods: bisection, fixed-point iteration, certificates
- cli: the `certinum` command
"""

from .config import Settings, DiffConfig, load_settings, get_settings, use_settings
from .errors import (
    CertinumError, ParseError, EvalError, ArgumentError, NonSmoothError,
    MethodPreconditionError, PreconditionKind, UncheckableTripleError,
)
from .lang import Program, Expr, Cond, parse_program, parse_expr, parse_cond, eval_expr, eval_cond, well_formed
from .interp import run, run_bounded_deterministic, Terminated, BudgetExhausted, RuntimeFault, TraceEvent
from .hoare import (
    HoareTriple, SamplePlan, CheckReport, make_triple, check_triple, check_annotations, falsify, load_spec,
)
from .calculus import (
    Jet, jet_eval, nth_derivative, nth_derivative_fd, taylor_poly, lagrange_witness,
    peano_remainder, peano_limit_probe, taylor_limit_probe, leibniz_product_check,
)
from .methods import (
    bisect, predicted_iterations, bisection_program, fixed_point, fixed_point_program,
    contraction_estimate, check_contraction_closure,
    linear_error_certificate, c1_certificate, quadratic_certificate,
)

__version__ = "0.1.0"

__all__ = [
    # Configuration
    "Settings", "DiffConfig", "load_settings", "get_settings", "use_settings",
    # Errors
    "CertinumError", "ParseError", "EvalError", "ArgumentError", "NonSmoothError",
    "MethodPreconditionError", "PreconditionKind", "UncheckableTripleError",
    # Language
    "Program", "Expr", "Cond", "parse_program", "parse_expr", "parse_cond",
    "eval_expr", "eval_cond", "well_formed",
    # Interpreter
    "run", "run_bounded_deterministic", "Terminated", "BudgetExhausted", "RuntimeFault", "TraceEvent",
    # Hoare triples
    "HoareTriple", "SamplePlan", "CheckReport", "make_triple", "check_triple",
    "check_annotations", "falsify", "load_spec",
    # Calculus
    "Jet", "jet_eval", "nth_derivative", "nth_derivative_fd", "taylor_poly", "lagrange_witness",
    "peano_remainder", "peano_limit_probe", "taylor_limit_probe", "leibniz_product_check",
    # Methods
    "bisect", "predicted_iterations", "bisection_program", "fixed_point", "fixed_point_program",
    "contraction_estimate", "check_contraction_closure",
    "linear_error_certificate", "c1_certificate", "quadratic_certificate",
]
