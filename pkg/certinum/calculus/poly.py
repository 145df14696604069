"""
Dense univariate polynomials.

A polynomial is a tuple of coefficients in ascending order, e.g. (1, 10, 5)
is 1 + 10x + 5x^2. Trailing zeros are stripped. Used as a symbolic oracle
for the jet engine (exact k-th derivatives) and to build test expressions.
"""

import math
from dataclasses import dataclass

from ..lang.ast import Expr, Const, Var, PowNat, BinOp, Binary


def normalize(coeffs) -> tuple:
    """Strip trailing zero coefficients."""
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", normalize(tuple(self.coeffs)))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial(tuple(a[i] + (b[i] if i < len(b) else 0) for i in range(len(a))))

    def scale(self, s) -> "Polynomial":
        return Polynomial(tuple(s * c for c in self.coeffs))

    def deriv(self, k: int = 1) -> "Polynomial":
        """Exact k-th derivative: coefficient i moves to i-k, times i!/(i-k)!."""
        if k < 0:
            raise ValueError(f"derivative order must be nonnegative, got {k}")
        return Polynomial(tuple(c * math.perm(i, k) for i, c in enumerate(self.coeffs) if i >= k))

    def to_expr(self, var: str = "x") -> Expr:
        """Expression tree sum c_i * var^i (constant and linear terms without a power node)."""
        x = Var(var)
        terms: list[Expr] = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(Const(c))
            elif i == 1:
                terms.append(Const(c) * x)
            else:
                terms.append(Const(c) * PowNat(x, i))
        if not terms:
            return Const(0.0)
        expr = terms[0]
        for term in terms[1:]:
            expr = Binary(BinOp.ADD, expr, term)
        return expr


DEMO_H_SOURCE = "(3 * t - 5) * t ^ 2 + (-1) ^ 0 * (1 * t) ^ 0 - (-(2 * t) + 7) + (t ^ 4 - 3 * t ^ 4)"


def demo_h() -> Expr:
    """
    The quartic H(t) = (3t - 5)t^2 + 1 - (-2t + 7) + (t^4 - 3t^4), written the
    long way round so that differentiation has to see through every operator.
    All derivatives of order 5 and above vanish.
    """
    from ..lang.parser import parse_expr
    return parse_expr(DEMO_H_SOURCE)
