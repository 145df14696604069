"""
Native bisection, statement for statement the annotated program:

    iter := 0; fa := f(a); fb := f(b); lower := a; upper := b;
    xmid := lower; ymid := f(xmid);
    while upper - lower > tol do
      iter := iter + 1; xmid := (lower + upper)/2; ymid := f(xmid);
      if fa*ymid > 0 then lower := xmid; fa := ymid else upper := xmid; fb := ymid fi
    od
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import MethodPreconditionError, PreconditionKind
from ..lang.evaluate import as_function

logger = logging.getLogger(__name__)


@dataclass
class BisectionStep:
    iter: int
    lower: float
    upper: float
    xmid: float
    ymid: float


@dataclass
class BisectionResult:
    xmid: float
    lower: float
    upper: float
    fa: float
    fb: float
    iter: int
    predicted_iter: int
    history: list[BisectionStep] = field(default_factory=list)

    @property
    def bracket_width(self) -> float:
        return self.upper - self.lower

    @property
    def root(self) -> float:
        """Midpoint of the final bracket. xmid is the last midpoint evaluated and sits on one end of it."""
        return (self.lower + self.upper) / 2

    def to_record(self) -> dict:
        return {
            "root": self.root,
            "xmid": self.xmid,
            "lower": self.lower,
            "upper": self.upper,
            "fa": self.fa,
            "fb": self.fb,
            "iter": self.iter,
            "predicted_iter": self.predicted_iter,
            "bracket_width": self.bracket_width,
        }


def _check_tolerance(a: float, b: float, tol: float):
    if not tol > 0:
        raise MethodPreconditionError(PreconditionKind.NONPOSITIVE_TOL, f"tol must be positive, got {tol!r}")
    if not b > a:
        raise MethodPreconditionError(PreconditionKind.DEGENERATE_BRACKET, f"need a < b, got [{a!r}, {b!r}]")
    if not tol < b - a:
        raise MethodPreconditionError(PreconditionKind.OVERSIZED_TOL, f"tol {tol!r} is not below b - a = {b - a!r}")


def predicted_iterations(a: float, b: float, tol: float) -> int:
    """Least k with (b - a)/2^k <= tol, by exact rational halving."""
    _check_tolerance(a, b, tol)
    width = Fraction(b) - Fraction(a)
    bound = Fraction(tol)
    k = 0
    while width > bound:
        width /= 2
        k += 1
    return k


def bisect(f, a: float, b: float, tol: float, var: str = "x", env=None, funcs=None) -> BisectionResult:
    """
    Bisection on [a, b] until the bracket is no wider than tol.

    `f` may be a callable, an Expr, a FunctionDef or source text. The branch
    test is the strict fa*ymid > 0, so a midpoint that is an exact root moves
    the upper end.
    """
    _check_tolerance(a, b, tol)
    fn = as_function(f, var, env, funcs)

    iter = 0
    fa = fn(a)
    fb = fn(b)
    if not fa * fb < 0:
        raise MethodPreconditionError(PreconditionKind.NO_SIGN_CHANGE, f"f(a) = {fa!r}, f(b) = {fb!r}")
    lower = a
    upper = b
    xmid = lower
    ymid = fn(xmid)
    history = [BisectionStep(iter, lower, upper, xmid, ymid)]
    while upper - lower > tol:
        iter = iter + 1
        xmid = (lower + upper) / 2
        ymid = fn(xmid)
        if fa * ymid > 0:
            lower = xmid
            fa = ymid
        else:
            upper = xmid
            fb = ymid
        history.append(BisectionStep(iter, lower, upper, xmid, ymid))

    predicted = predicted_iterations(a, b, tol)
    if iter != predicted:
        logger.warning(f"bisection took {iter} iterations, exact halving predicts {predicted}")
    logger.debug(f"bisect [{a}, {b}] tol={tol}: xmid={xmid!r} after {iter} iterations")
    return BisectionResult(xmid=xmid, lower=lower, upper=upper, fa=fa, fb=fb, iter=iter,
                           predicted_iter=predicted, history=history)
