"""
Convergence certificates for fixed-point iteration.

A certificate pairs an a-priori error bound with the measured errors
|x_n - r| of recorded trajectories, entry by entry:

- linear:    |x_n - r| <= c^n |x0 - r|
- c1:        |x_n - r| <= (1 - eps)^n |x0 - r|, eps = (1 - |f'(r)|)/2, on a ball
             where the sampled sup of |f'| is at most 1 - eps
- quadratic: E_k <= C^(2^k - 1) E_0^(2^k), C = (|f''(r)| + eps)/2, on a ball
             where additionally the sampled sup of |h_2| is below eps/2

Every comparison allows a rounding slack of a few ulps of the trajectory
magnitude |r| + |x0 - r|. Balls are sampled on equispaced grids; the
certificate is evidence at the sampled points, not a proof on the ball.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

from ..config import get_settings
from ..errors import EvalError, MethodPreconditionError, PreconditionKind
from ..lang.ast import Expr, FunctionDef
from ..lang.evaluate import as_function
from ..calculus.jet import nth_derivative
from ..calculus.taylor import peano_remainder
from .fixed_point import FixedPointResult, fixed_point, require_fixed_point, ball_points

logger = logging.getLogger(__name__)


class CertificateKind(Enum):
    LINEAR = "linear"
    C1 = "c1"
    QUADRATIC = "quadratic"


@dataclass
class CertificateEntry:
    x0: float
    n: int
    bound: float
    measured: float
    ok: bool


@dataclass
class Certificate:
    kind: CertificateKind
    r: float
    parameters: dict = field(default_factory=dict)
    entries: list[CertificateEntry] = field(default_factory=list)
    root_source: str = "caller"

    @property
    def holds(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def failures(self) -> list[CertificateEntry]:
        return [e for e in self.entries if not e.ok]

    def to_record(self) -> dict:
        return {
            "kind": self.kind.value,
            "r": self.r,
            "root_source": self.root_source,
            "parameters": self.parameters,
            "holds": self.holds,
            "entries": [
                {"x0": e.x0, "n": e.n, "bound": e.bound, "measured": e.measured, "ok": e.ok}
                for e in self.entries
            ],
        }


def rounding_slack(x0: float, r: float) -> float:
    return get_settings().slack_ulps * math.ulp(abs(r) + abs(x0 - r))


def _as_expr(f) -> Expr:
    if isinstance(f, str):
        from ..lang.parser import parse_expr
        return parse_expr(f)
    if not isinstance(f, Expr):
        raise TypeError(f"certificates need an expression, got {f!r}")
    return f


def _trajectory(run: Union[FixedPointResult, Sequence[float], None]) -> list[float]:
    if run is None:
        raise MethodPreconditionError(PreconditionKind.MISSING_TRAJECTORY, "no trajectory recorded")
    points = run.trajectory if isinstance(run, FixedPointResult) else list(run)
    if not points:
        raise MethodPreconditionError(PreconditionKind.MISSING_TRAJECTORY, "trajectory is empty")
    return points


def _rate_entries(points: list[float], r: float, rate: float) -> list[CertificateEntry]:
    x0 = points[0]
    e0 = abs(x0 - r)
    slack = rounding_slack(x0, r)
    entries = []
    for n, x in enumerate(points):
        bound = rate ** n * e0
        measured = abs(x - r)
        entries.append(CertificateEntry(x0=x0, n=n, bound=bound, measured=measured, ok=measured <= bound + slack))
    return entries


def linear_error_certificate(f, r: float, c: float, run, var: str = "x", env=None, funcs=None) -> Certificate:
    """|x_n - r| <= c^n |x0 - r| along one recorded trajectory."""
    if not 0 <= c < 1:
        raise MethodPreconditionError(PreconditionKind.NOT_A_CONTRACTION, f"need 0 <= c < 1, got {c!r}")
    require_fixed_point(as_function(f, var, env, funcs), r)
    points = _trajectory(run)
    cert = Certificate(kind=CertificateKind.LINEAR, r=r, parameters={"c": c},
                       entries=_rate_entries(points, r, c))
    logger.info(f"linear certificate c={c} from x0={points[0]!r}: {'holds' if cert.holds else 'FAILS'}")
    return cert


# =============================================================================
# Derivative-based certificates
# =============================================================================

def _grid_sup(values) -> float:
    return max(values) if values else math.inf


def _derivative_sup(e: Expr, var: str, r: float, delta: float, env, funcs) -> float:
    """Sampled sup of |f'| on the closed ball; inf if f' fails anywhere."""
    try:
        return _grid_sup([abs(nth_derivative(e, var, 1, float(x), env, funcs))
                          for x in ball_points(r, delta, get_settings().grid_points)])
    except EvalError as err:
        logger.debug(f"f' not available on |x - {r}| <= {delta}: {err}")
        return math.inf


def _delta_schedule(r: float) -> list[float]:
    s = get_settings()
    scale = max(1.0, abs(r))
    return [scale * 2.0 ** -k for k in range(s.delta_min_exponent, s.delta_max_exponent + 1)]


def _contraction_ball(e: Expr, var: str, r: float, env, funcs) -> tuple[float, float, float]:
    """(delta, eps, |f'(r)|): the largest scheduled delta with sup |f'| <= 1 - eps."""
    fn = as_function(e, var, env, funcs)
    require_fixed_point(fn, r)
    d1 = abs(nth_derivative(e, var, 1, r, env, funcs))
    if not d1 < 1:
        raise MethodPreconditionError(PreconditionKind.DERIVATIVE_TOO_LARGE, f"|f'({r!r})| = {d1!r} >= 1")
    eps = (1 - d1) / 2
    for delta in _delta_schedule(r):
        sup = _derivative_sup(e, var, r, delta, env, funcs)
        logger.debug(f"delta={delta!r}: sup |f'| = {sup!r} against {1 - eps!r}")
        if sup <= 1 - eps:
            return delta, eps, d1
    raise MethodPreconditionError(PreconditionKind.NO_DELTA_FOUND,
                                  f"no delta in the schedule gives sup |f'| <= {1 - eps!r} around {r!r}")


def _trajectories(e: Expr, var: str, r: float, delta: float, tol: float, max_iter: int,
                  env, funcs, closed: bool) -> list[list[float]]:
    starts = ball_points(r, delta, get_settings().grid_points, closed=closed)
    return [fixed_point(e, float(x0), tol, max_iter, var, env, funcs).trajectory for x0 in starts]


def c1_certificate(f, r: float, tol: float, max_iter: int, var: str = "x", env=None, funcs=None
                   ) -> tuple[float, float, Certificate]:
    """
    Find delta and eps with sup |f'| <= 1 - eps on |x - r| <= delta, then check the
    (1 - eps)^n rate on trajectories started at every grid point of that ball.
    """
    e = _as_expr(f)
    delta, eps, d1 = _contraction_ball(e, var, r, env, funcs)
    cert = Certificate(kind=CertificateKind.C1, r=r,
                       parameters={"delta": delta, "epsilon": eps, "rate": 1 - eps, "abs_deriv_r": d1})
    for points in _trajectories(e, var, r, delta, tol, max_iter, env, funcs, closed=True):
        cert.entries.extend(_rate_entries(points, r, 1 - eps))
    logger.info(f"c1 certificate at r={r!r}: delta={delta!r}, eps={eps!r}, {'holds' if cert.holds else 'FAILS'}")
    return delta, eps, cert


def quadratic_bound(C: float, e0: float, k: int) -> float:
    """C^(2^k - 1) * e0^(2^k), computed in logs to stay finite for large k."""
    if e0 == 0:
        return 0.0
    if C == 0:
        return e0 if k == 0 else 0.0
    log_bound = (2 ** k) * math.log(C * e0) - math.log(C)
    if log_bound < -745:
        return 0.0
    return math.exp(min(log_bound, 709.0))


def _remainder_sup(e: Expr, var: str, r: float, delta: float, env, funcs) -> float:
    settings = get_settings()
    values = [abs(peano_remainder(e, var, 2, r, float(x), dps=settings.dps, env=env, funcs=funcs))
              for x in ball_points(r, delta, settings.grid_points) if float(x) != r]
    return _grid_sup(values)


def quadratic_certificate(f, r: float, tol: float, max_iter: int, var: str = "x", env=None, funcs=None
                          ) -> tuple[float, float, Certificate]:
    """
    For f'(r) = 0: shrink the c1 ball until the sampled sup of the Peano
    remainder |h_2| is below eps/2, then check
    E_k <= ((|f''(r)| + eps)/2)^(2^k - 1) E_0^(2^k) on trajectories started
    strictly inside the ball.
    """
    settings = get_settings()
    e = _as_expr(f)
    fn = as_function(e, var, env, funcs)
    require_fixed_point(fn, r)
    d1 = nth_derivative(e, var, 1, r, env, funcs)
    if abs(d1) > settings.derivative_zero_tol:
        raise MethodPreconditionError(PreconditionKind.DERIVATIVE_NONZERO, f"f'({r!r}) = {d1!r} is not 0")
    f2 = abs(nth_derivative(e, var, 2, r, env, funcs))

    delta, eps, _ = _contraction_ball(e, var, r, env, funcs)
    while _remainder_sup(e, var, r, delta, env, funcs) >= eps / 2:
        delta /= 2
        if delta < max(1.0, abs(r)) * 2.0 ** -settings.delta_max_exponent:
            raise MethodPreconditionError(PreconditionKind.NO_DELTA_FOUND,
                                          f"sup |h_2| stays above {eps / 2!r} around {r!r}")
    C = (f2 + eps) / 2

    cert = Certificate(kind=CertificateKind.QUADRATIC, r=r,
                       parameters={"delta": delta, "epsilon": eps, "C": C, "abs_f2_r": f2})
    for points in _trajectories(e, var, r, delta, tol, max_iter, env, funcs, closed=False):
        x0 = points[0]
        e0 = abs(x0 - r)
        slack = rounding_slack(x0, r)
        for k, x in enumerate(points):
            bound = quadratic_bound(C, e0, k)
            measured = abs(x - r)
            cert.entries.append(CertificateEntry(x0=x0, n=k, bound=bound, measured=measured,
                                                 ok=measured <= bound + slack))
    logger.info(f"quadratic certificate at r={r!r}: delta={delta!r}, C={C!r}, {'holds' if cert.holds else 'FAILS'}")
    return delta, eps, cert


def certify(kind: Union[CertificateKind, str], f, r: Optional[float] = None, run: Optional[FixedPointResult] = None,
            c: Optional[float] = None, tol: float = 1e-3, max_iter: int = 100, var: str = "x",
            env=None, funcs=None) -> Certificate:
    """
    Dispatch used by the CLI: build the certificate of the requested kind.

    Without r, the fixed point is refined in extended precision from the end
    of `run` and the certificate records root_source = "oracle".
    """
    kind = CertificateKind(kind)
    source = "caller"
    if r is None:
        from ..hoare.oracles import fixed_point_root
        start = _trajectory(run)[-1]
        r = fixed_point_root(FunctionDef(var, _as_expr(f)), start)
        source = "oracle"
        logger.info(f"fixed point refined by the oracle: r={r!r}")
    if kind is CertificateKind.LINEAR:
        cert = linear_error_certificate(f, r, c, run, var, env, funcs)
    elif kind is CertificateKind.C1:
        cert = c1_certificate(f, r, tol, max_iter, var, env, funcs)[2]
    else:
        cert = quadratic_certificate(f, r, tol, max_iter, var, env, funcs)[2]
    cert.root_source = source
    return cert
