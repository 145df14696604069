"""
Central finite-difference derivatives of black-box functions.

Independent oracle for the jet engine: the n-th order central stencil
h^-n * sum_j (-1)^j C(n, j) f(a + (n/2 - j) h), truncation error O(h^2).
"""

import math
import sys
from typing import Optional

from ..config import DiffConfig, get_settings
from ..lang.evaluate import as_function

EPS = sys.float_info.epsilon


def default_step(n: int, a: float) -> float:
    """Scale-relative step max(1, |a|) * eps^(1/(n+2)), balancing truncation and rounding."""
    return max(1.0, abs(a)) * EPS ** (1.0 / (n + 2))


def nth_derivative_fd(f, n: int, a: float, cfg: Optional[DiffConfig] = None, var: str = "x") -> float:
    """Central-difference estimate of f^(n)(a); `f` is a callable or anything as_function accepts."""
    f = as_function(f, var)
    if n < 0:
        raise ValueError(f"derivative order must be nonnegative, got {n}")
    if n == 0:
        return f(a)
    cfg = cfg or get_settings().diff
    h = cfg.fd_step if cfg.fd_step is not None else default_step(n, a)
    total = 0.0
    for j in range(n + 1):
        total += (-1) ** j * math.comb(n, j) * f(a + (n / 2 - j) * h)
    return total / h ** n
