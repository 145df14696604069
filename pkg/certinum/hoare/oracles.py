"""
Witness oracles for existential postconditions.

An oracle takes a bound function and numbers from the final state and
returns the value of the existentially quantified variable. Both oracles
work in extended precision and round the result to binary64 once.
"""

import logging
from typing import Callable, Optional

from ..config import get_settings
from ..errors import EvalError
from ..lang.ast import FunctionDef
from ..calculus.jet import extended, value_at

logger = logging.getLogger(__name__)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def bracket_root(fn: FunctionDef, lower: float, upper: float,
                 iterations: Optional[int] = None, dps: Optional[int] = None) -> float:
    """Root of fn inside [lower, upper] by extended-precision bisection."""
    settings = get_settings()
    iterations = iterations if iterations is not None else settings.oracle_iterations
    mp = extended(dps)

    def f(x):
        return value_at(fn.body, fn.formal, x, mp)

    lo, hi = mp.num(lower), mp.num(upper)
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return float(lo)
    if fhi == 0:
        return float(hi)
    if _sign(flo) == _sign(fhi):
        raise EvalError(f"no sign change on [{lower!r}, {upper!r}] for the root oracle")
    for _ in range(iterations):
        mid = (lo + hi) / 2
        fmid = f(mid)
        if fmid == 0:
            return float(mid)
        if _sign(fmid) == _sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return float((lo + hi) / 2)


def fixed_point_root(fn: FunctionDef, start: float,
                     iterations: Optional[int] = None, dps: Optional[int] = None) -> float:
    """Fixed point of fn reached by iterating from `start` in extended precision."""
    settings = get_settings()
    iterations = iterations if iterations is not None else settings.oracle_iterations
    mp = extended(dps)
    x = mp.num(start)
    for _ in range(iterations):
        nxt = value_at(fn.body, fn.formal, x, mp)
        if nxt == x:
            break
        x = nxt
    return float(x)


ORACLES: dict[str, Callable[..., float]] = {
    "bracket_root": bracket_root,
    "fixed_point_root": fixed_point_root,
}
