"""
Taylor polynomials and remainder analysis.

Handles:
- Taylor polynomials S_n read off a jet at the center
- Lagrange witness search: a point t between c and x with
  f(x) = S_{n-1}(x) + f^(n)(t)/n! (x - c)^n
- Peano remainder h_n(x) = (f(x) - S_n(x)) / (x - c)^n and its limit probe
- The Taylor-as-limit probe: (f(x) - S_{n-1}(x)) / (x - c)^n tends to f^(n)(c)/n!
- Leibniz product rule check on two expressions
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from ..config import get_settings
from ..errors import MethodPreconditionError, PreconditionKind
from ..lang.ast import Expr, Const, Var, PowNat, BinOp, Binary, FunctionDef
from ..lang.values import Value
from .jet import FLOAT, extended, jet_eval, value_at

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TaylorPoly:
    """S_n(x) = sum_m coeffs[m] (x - center)^m."""
    center: float
    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: float) -> float:
        d = x - self.center
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * d + c
        return acc

    def to_expr(self, var: str = "x") -> Expr:
        d = Var(var) - Const(self.center) if self.center else Var(var)
        expr: Expr = Const(self.coeffs[0])
        for m, c in enumerate(self.coeffs[1:], start=1):
            expr = Binary(BinOp.ADD, expr, Const(c) * PowNat(d, m))
        return expr


def taylor_poly(
    e: Expr,
    var: str,
    c: float,
    n: int,
    env: Optional[Mapping[str, Value]] = None,
    funcs: Optional[Mapping[str, FunctionDef]] = None,
) -> TaylorPoly:
    """Degree-n Taylor polynomial of `e` at c."""
    return TaylorPoly(center=c, coeffs=tuple(jet_eval(e, var, c, n, env, funcs).floats()))


def _horner(coeffs: Sequence, d, zero):
    acc = zero
    for c in reversed(coeffs):
        acc = acc * d + c
    return acc


def _check_points(c: float, x: float):
    if x == c:
        raise MethodPreconditionError(PreconditionKind.COINCIDENT_POINTS, f"x = c = {c!r}")


# =============================================================================
# Lagrange form
# =============================================================================

@dataclass
class LagrangeWitness:
    t: float
    residual: float        # |g(t)|
    localized: bool        # bracketed by a sign change, or |g(t)| within tolerance
    sign_change: bool


def lagrange_witness(
    e: Expr,
    var: str,
    n: int,
    c: float,
    x: float,
    tol_t: float = 1e-8,
    env: Optional[Mapping[str, Value]] = None,
    funcs: Optional[Mapping[str, FunctionDef]] = None,
) -> LagrangeWitness:
    """
    Search t strictly between c and x with g(t) = 0, where
    g(t) = f(x) - S_{n-1}(x) - f^(n)(t)/n! (x - c)^n.

    The fixed part f(x) - S_{n-1}(x) is computed in extended precision. If g
    changes sign on the interior grid the root is bisected; otherwise the grid
    point of least |g| is returned and flagged unless |g| <= tol_t.
    """
    if n < 1:
        raise MethodPreconditionError(PreconditionKind.BAD_ORDER, f"Lagrange form needs n >= 1, got {n}")
    _check_points(c, x)
    from ..methods.bisection import bisect

    settings = get_settings()
    mp = extended()
    head = jet_eval(e, var, c, n - 1, env, funcs, arith=mp).coeffs
    d = mp.num(x) - mp.num(c)
    fixed = float(value_at(e, var, x, mp, env, funcs) - _horner(head, d, mp.num(0)))
    scale = (x - c) ** n / math.factorial(n)

    def g(t: float) -> float:
        return fixed - jet_eval(e, var, t, n, env, funcs).derivative(n) * scale

    ts = c + (x - c) * np.arange(1, settings.grid_points + 1) / (settings.grid_points + 1)
    values = np.array([g(float(t)) for t in ts])

    if not values.any():
        mid = c + (x - c) / 2
        return LagrangeWitness(t=mid, residual=0.0, localized=True, sign_change=False)

    zero = np.flatnonzero(values == 0)
    if zero.size:
        return LagrangeWitness(t=float(ts[zero[0]]), residual=0.0, localized=True, sign_change=True)

    flips = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
    if flips.size:
        i = int(flips[0])
        lo, hi = sorted((float(ts[i]), float(ts[i + 1])))
        tol = min(1e-12 * max(1.0, abs(x - c)), (hi - lo) / 2)
        t = bisect(g, lo, hi, tol).xmid
        return LagrangeWitness(t=t, residual=abs(g(t)), localized=True, sign_change=True)

    i = int(np.argmin(np.abs(values)))
    residual = float(abs(values[i]))
    localized = residual <= tol_t
    if not localized:
        logger.warning(f"Lagrange witness not localized: min |g| = {residual:.3g} > {tol_t:.3g} (n={n}, c={c}, x={x})")
    return LagrangeWitness(t=float(ts[i]), residual=residual, localized=localized, sign_change=False)


# =============================================================================
# Peano form
# =============================================================================

def _remainder(e, var, n, c, x, arith, series, env, funcs):
    d = arith.num(x) - arith.num(c)
    fx = value_at(e, var, x, arith, env, funcs)
    return (fx - _horner(series, d, arith.num(0))) / d ** n


def peano_remainder(
    e: Expr,
    var: str,
    n: int,
    c: float,
    x: float,
    dps: Optional[int] = None,
    env: Optional[Mapping[str, Value]] = None,
    funcs: Optional[Mapping[str, FunctionDef]] = None,
) -> float:
    """h_n(x) = (f(x) - S_n(x)) / (x - c)^n; binary64 unless `dps` asks for extended precision."""
    _check_points(c, x)
    arith = FLOAT if dps is None else extended(dps)
    series = jet_eval(e, var, c, n, env, funcs, arith=arith).coeffs
    return float(_remainder(e, var, n, c, x, arith, series, env, funcs))


@dataclass
class ProbeReport:
    """Two-sided decay table of a remainder quantity as the radius shrinks."""
    kind: str
    n: int
    center: float
    threshold: float
    radii: list[float]
    maxima: list[float]                       # max over c - r, c + r per radius
    samples: list[tuple[float, float]] = field(default_factory=list)   # (x, value)
    limit: Optional[float] = None
    passed: bool = False
    coverage: str = ""

    def to_record(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "center": self.center,
            "threshold": self.threshold,
            "radii": self.radii,
            "maxima": self.maxima,
            "limit": self.limit,
            "passed": self.passed,
            "coverage": self.coverage,
        }


def decays(maxima: Sequence[float], threshold: float) -> bool:
    """Tail within threshold and non-increasing after the peak (up to a noise floor)."""
    if not maxima:
        return False
    tail = maxima[-4:]
    if max(tail) > threshold:
        return False
    floor = threshold * 1e-6
    peak = int(np.argmax(maxima))
    return all(later <= earlier + floor for earlier, later in zip(maxima[peak:], maxima[peak + 1:]))


def _probe(kind, e, var, n, c, radii, threshold, dps, env, funcs, order, offset) -> ProbeReport:
    settings = get_settings()
    radii = list(radii) if radii is not None else settings.diff.probe_radii(c)
    threshold = threshold if threshold is not None else settings.diff.probe_threshold
    if any(r <= 0 for r in radii) or any(b >= a for a, b in zip(radii, radii[1:])):
        raise MethodPreconditionError(PreconditionKind.NONPOSITIVE_RADIUS, "radii must be positive and strictly decreasing")

    arith = extended(dps)
    series = jet_eval(e, var, c, order, env, funcs, arith=arith).coeffs
    limit = series[n] if offset else arith.num(0)
    report = ProbeReport(kind=kind, n=n, center=c, threshold=threshold, radii=radii, maxima=[],
                         limit=float(limit) if offset else None)
    for r in radii:
        worst = 0.0
        for x in (c - r, c + r):
            if x == c:
                continue
            q = _remainder(e, var, n, c, x, arith, series[:order + 1 - offset], env, funcs) - limit
            value = abs(float(q))
            report.samples.append((x, value))
            worst = max(worst, value)
        report.maxima.append(worst)

    report.passed = decays(report.maxima, threshold)
    report.coverage = (
        f"{2 * len(radii)} points at radii {radii[0]:.3g}..{radii[-1]:.3g} around {c!r}, "
        f"{arith.dps} digits; sampled decay, not a proof of the limit"
    )
    logger.info(f"{kind} probe n={n} at {c!r}: {'pass' if report.passed else 'FAIL'} (tail max {max(report.maxima[-4:]):.3g})")
    return report


def peano_limit_probe(
    e: Expr,
    var: str,
    n: int,
    c: float,
    radii: Optional[Sequence[float]] = None,
    threshold: Optional[float] = None,
    dps: Optional[int] = None,
    env: Optional[Mapping[str, Value]] = None,
    funcs: Optional[Mapping[str, FunctionDef]] = None,
) -> ProbeReport:
    """
    Probe h_n(c +- r) -> 0 over a shrinking radii schedule (extended precision,
    since binary64 cancellation in f(x) - S_n(x) swamps |x - c|^n quickly).
    Non-smooth `e` at c fails in jet_eval before any sampling.
    """
    return _probe("peano", e, var, n, c, radii, threshold, dps, env, funcs, order=n, offset=0)


def taylor_limit_probe(
    e: Expr,
    var: str,
    n: int,
    c: float,
    radii: Optional[Sequence[float]] = None,
    threshold: Optional[float] = None,
    dps: Optional[int] = None,
    env: Optional[Mapping[str, Value]] = None,
    funcs: Optional[Mapping[str, FunctionDef]] = None,
) -> ProbeReport:
    """Probe |(f(x) - S_{n-1}(x)) / (x - c)^n - f^(n)(c)/n!| -> 0."""
    if n < 1:
        raise MethodPreconditionError(PreconditionKind.BAD_ORDER, f"limit form needs n >= 1, got {n}")
    return _probe("taylor-limit", e, var, n, c, radii, threshold, dps, env, funcs, order=n, offset=1)


# =============================================================================
# Leibniz
# =============================================================================

@dataclass
class LeibnizCheck:
    lhs: float
    rhs: float
    error: float
    holds: bool


def leibniz_product_check(
    f: Expr,
    g: Expr,
    var: str,
    n: int,
    x: float,
    env: Optional[Mapping[str, Value]] = None,
    funcs: Optional[Mapping[str, FunctionDef]] = None,
) -> LeibnizCheck:
    """
    (f g)^(n)(x) against sum_k C(n, k) f^(k)(x) g^(n-k)(x).

    Both sides are summed in extended precision and rounded to binary64 once;
    they must agree within 32 ulps of max(|lhs|, |rhs|, 1).
    """
    arith = extended()
    jfg = jet_eval(Binary(BinOp.MUL, f, g), var, x, n, env, funcs, arith)
    jf = jet_eval(f, var, x, n, env, funcs, arith)
    jg = jet_eval(g, var, x, n, env, funcs, arith)

    def nth(jet, m):
        return jet.coeffs[m] * math.factorial(m)

    lhs = arith.to_float(nth(jfg, n))
    rhs = arith.to_float(sum((math.comb(n, k) * nth(jf, k) * nth(jg, n - k) for k in range(n + 1)), arith.num(0)))
    error = abs(lhs - rhs)
    holds = error <= 32 * math.ulp(max(abs(lhs), abs(rhs), 1.0))
    return LeibnizCheck(lhs=lhs, rhs=rhs, error=error, holds=holds)
