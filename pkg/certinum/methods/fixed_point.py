"""
Native fixed-point iteration and contraction checks.

Handles:
- fixed_point: the annotated fixed-point program with its Break flag, which
  stops the loop one iteration after the distance test succeeds
- contraction_estimate: sampled Lipschitz ratio on a ball around r
- check_contraction_closure: iterates started in the ball stay in it
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..config import get_settings
from ..errors import MethodPreconditionError, PreconditionKind
from ..lang.evaluate import as_function

logger = logging.getLogger(__name__)

DEFAULT_PAIRS = 1024


@dataclass
class FixedPointResult:
    x: float
    x_new: float
    itr: int
    break_flag: int
    trajectory: list[float] = field(default_factory=list)    # x at each loop head: x0 ... x_itr
    trigger: Optional[tuple[int, float]] = None              # (itr, |x_new - x|) when Break was set

    @property
    def converged(self) -> bool:
        return self.break_flag == 1

    def to_record(self) -> dict:
        return {
            "x": self.x,
            "x_new": self.x_new,
            "itr": self.itr,
            "break": self.break_flag,
            "converged": self.converged,
        }


def fixed_point(f, x0: float, tol: float, max_iter: int, var: str = "x", env=None, funcs=None) -> FixedPointResult:
    """
    x := x0; x_new := f x; itr := 0; Break := 0;
    while itr < max_iter and Break = 0:
      if |x_new - x| < tol then Break := 1; x := x_new; x_new := f x; itr := itr + 1
    """
    if max_iter < 0:
        raise MethodPreconditionError(PreconditionKind.NEGATIVE_MAX_ITER, f"max_iter must be nonnegative, got {max_iter}")
    if not tol > 0:
        raise MethodPreconditionError(PreconditionKind.NONPOSITIVE_TOL, f"tol must be positive, got {tol!r}")
    fn = as_function(f, var, env, funcs)

    x = x0
    x_new = fn(x)
    itr = 0
    brk = 0
    trajectory = [x]
    trigger = None
    while itr < max_iter and brk == 0:
        if abs(x_new - x) < tol:
            brk = 1
            trigger = (itr, abs(x_new - x))
        x = x_new
        x_new = fn(x)
        itr = itr + 1
        trajectory.append(x)

    logger.debug(f"fixed_point from {x0!r}: x={x!r}, itr={itr}, break={brk}")
    return FixedPointResult(x=x, x_new=x_new, itr=itr, break_flag=brk, trajectory=trajectory, trigger=trigger)


def is_fixed_point(fn, r: float, ulps: Optional[int] = None) -> bool:
    """f(r) = r within a few ulps of r."""
    ulps = ulps if ulps is not None else get_settings().fixed_point_ulps
    return abs(fn(r) - r) <= ulps * math.ulp(r)


def require_fixed_point(fn, r: float):
    if not is_fixed_point(fn, r):
        raise MethodPreconditionError(PreconditionKind.NOT_A_FIXED_POINT, f"f({r!r}) = {fn(r)!r}")


def contraction_estimate(
    f,
    r: float,
    delta: float,
    samples: int = DEFAULT_PAIRS,
    seed: Optional[int] = None,
    var: str = "x",
    env=None,
    funcs=None,
) -> float:
    """
    Largest |f(s) - f(t)| / |s - t| over seeded random pairs in the open ball
    |x - r| < delta. A sampled lower bound on the Lipschitz constant, not a proof.
    """
    if not delta > 0:
        raise MethodPreconditionError(PreconditionKind.NONPOSITIVE_RADIUS, f"delta must be positive, got {delta!r}")
    fn = as_function(f, var, env, funcs)
    seed = seed if seed is not None else get_settings().seed
    rng = np.random.default_rng(seed)
    points = rng.uniform(r - delta, r + delta, size=(samples, 2))

    c_hat = 0.0
    for s, t in points:
        s, t = float(s), float(t)
        if s == t or abs(s - r) >= delta or abs(t - r) >= delta:
            continue
        c_hat = max(c_hat, abs(fn(s) - fn(t)) / abs(s - t))
    logger.debug(f"contraction estimate on |x - {r}| < {delta}: {c_hat:.6g} from {samples} pairs")
    return c_hat


def ball_points(r: float, delta: float, n: int, closed: bool = True) -> np.ndarray:
    """n equispaced points of [r - delta, r + delta] (endpoints dropped for the open ball)."""
    if closed:
        return np.linspace(r - delta, r + delta, n)
    return np.linspace(r - delta, r + delta, n + 2)[1:-1]


def check_contraction_closure(
    f,
    r: float,
    c: float,
    delta: float,
    n_max: int,
    samples: Optional[int] = None,
    var: str = "x",
    env=None,
    funcs=None,
) -> bool:
    """Every sampled x with |x - r| < delta keeps |f^n(x) - r| < delta for n <= n_max."""
    fn = as_function(f, var, env, funcs)
    require_fixed_point(fn, r)
    if not 0 <= c < 1:
        raise MethodPreconditionError(PreconditionKind.NOT_A_CONTRACTION, f"need 0 <= c < 1, got {c!r}")
    if not delta > 0:
        raise MethodPreconditionError(PreconditionKind.NONPOSITIVE_RADIUS, f"delta must be positive, got {delta!r}")
    samples = samples if samples is not None else get_settings().grid_points

    for x in ball_points(r, delta, samples, closed=False):
        x = float(x)
        for n in range(1, n_max + 1):
            x = fn(x)
            if not abs(x - r) < delta:
                logger.info(f"iterate {n} left the ball: |{x!r} - {r!r}| >= {delta!r}")
                return False
    return True
