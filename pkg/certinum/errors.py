"""
Exception hierarchy for certinum.

Evaluation failures inside a program run are not raised to the caller: the
interpreter turns them into a RuntimeFault outcome. Everything else surfaces
as one of these.
"""

from enum import Enum
from typing import Optional


class CertinumError(Exception):
    """Base class for all certinum errors."""


class ParseError(CertinumError, ValueError):
    """Syntax error in program, spec file or CLI argument text."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class EvalError(CertinumError, ArithmeticError):
    """Expression or condition could not be evaluated."""


class ArgumentError(CertinumError, TypeError):
    """Program arguments do not match the parameters in count or sort."""


class NonSmoothError(EvalError):
    """Jet evaluation hit a node at its kink (Abs at 0, Floor at an integer...)."""

    def __init__(self, node: str, point: float):
        self.node = node
        self.point = point
        super().__init__(f"{node} is not differentiable at argument {point!r}")


class PreconditionKind(Enum):
    NONPOSITIVE_TOL = "nonpositive-tol"
    OVERSIZED_TOL = "oversized-tol"
    DEGENERATE_BRACKET = "degenerate-bracket"
    NO_SIGN_CHANGE = "no-sign-change"
    NEGATIVE_MAX_ITER = "negative-max-iter"
    NONPOSITIVE_RADIUS = "nonpositive-radius"
    NOT_A_FIXED_POINT = "not-a-fixed-point"
    NOT_A_CONTRACTION = "not-a-contraction"
    DERIVATIVE_TOO_LARGE = "derivative-too-large"
    DERIVATIVE_NONZERO = "derivative-nonzero"
    NO_DELTA_FOUND = "no-delta-found"
    MISSING_TRAJECTORY = "missing-trajectory"
    BAD_ORDER = "bad-order"
    COINCIDENT_POINTS = "coincident-points"


class MethodPreconditionError(CertinumError, ValueError):
    """A numerical method was called outside its stated hypotheses."""

    def __init__(self, kind: PreconditionKind, message: str):
        self.kind = kind
        super().__init__(f"{kind.value}: {message}")


class UncheckableTripleError(CertinumError, ValueError):
    """Triple has existentials in its postcondition with no registered witness."""

    def __init__(self, missing: list[str]):
        self.missing = missing
        super().__init__(f"no witness registered for: {', '.join(missing)}")
