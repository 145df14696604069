"""
Truncated Taylor (jet) arithmetic on expression trees.

A jet of order k at a holds coeffs[m] = f^(m)(a) / m! for m = 0..k. Jets are
propagated bottom-up through the tree: sums and products by convolution,
quotients by the division recurrence, exp/ln/sin/cos/sqrt by their standard
first-order ODE recurrences. The m-th derivative is coeffs[m] * m!.

Coefficients are plain numbers of an arithmetic backend: Python floats
(binary64) or mpmath numbers at a chosen number of digits.
"""

import math
from dataclasses import dataclass
from typing import Mapping, Optional

from mpmath.ctx_mp import MPContext

from ..config import get_settings
from ..errors import EvalError, NonSmoothError
from ..lang.ast import (
    Expr, Const, NatConst, Var, Unary, Binary, PowNat, Apply, Index, Card, Iterate,
    UnaryOp, BinOp, FunctionDef,
)
from ..lang.values import Value, Vec

Series = list


# =============================================================================
# Arithmetic backends
# =============================================================================

class FloatArith:
    """binary64 arithmetic via the math module."""
    name = "float"

    def num(self, x):
        return float(x)

    def to_float(self, x) -> float:
        return float(x)

    exp = staticmethod(math.exp)
    log = staticmethod(math.log)
    sin = staticmethod(math.sin)
    cos = staticmethod(math.cos)
    sqrt = staticmethod(math.sqrt)
    floor = staticmethod(math.floor)
    ceil = staticmethod(math.ceil)

    def ulp(self, x) -> float:
        return math.ulp(float(x))


class MpArith:
    """Extended precision via a private mpmath context."""
    name = "mpmath"

    def __init__(self, dps: int):
        self.dps = dps
        self.ctx = MPContext()
        self.ctx.dps = dps

    def num(self, x):
        return self.ctx.mpf(x)

    def to_float(self, x) -> float:
        return float(x)

    def exp(self, x):
        return self.ctx.exp(x)

    def log(self, x):
        return self.ctx.log(x)

    def sin(self, x):
        return self.ctx.sin(x)

    def cos(self, x):
        return self.ctx.cos(x)

    def sqrt(self, x):
        return self.ctx.sqrt(x)

    def floor(self, x) -> int:
        return int(self.ctx.floor(x))

    def ceil(self, x) -> int:
        return int(self.ctx.ceil(x))

    def ulp(self, x) -> float:
        return math.ulp(float(x))


FLOAT = FloatArith()


def extended(dps: Optional[int] = None) -> MpArith:
    """mpmath backend; digits default to the configured precision."""
    return MpArith(dps if dps is not None else get_settings().dps)


# =============================================================================
# Jets
# =============================================================================

@dataclass(frozen=True)
class Jet:
    """Taylor coefficients f^(m)(point)/m!, m = 0..order."""
    point: float
    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a jet needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self, m: int) -> float:
        """f^(m)(point) as a float."""
        return float(self.coeffs[m] * math.factorial(m))

    def floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]


class JetEvaluator:
    """Propagates jets of a fixed order through expression trees."""

    def __init__(self, order: int, arith=FLOAT, env: Optional[Mapping[str, Value]] = None,
                 funcs: Optional[Mapping[str, FunctionDef]] = None):
        if order < 0:
            raise ValueError(f"jet order must be nonnegative, got {order}")
        self.order = order
        self.size = order + 1
        self.arith = arith
        self.env = dict(env or {})
        self.funcs = dict(funcs or {})

    # -- series primitives ----------------------------------------------

    def constant(self, value) -> Series:
        zero = self.arith.num(0)
        return [self.arith.num(value)] + [zero] * self.order

    def variable(self, point) -> Series:
        s = self.constant(point)
        if self.order >= 1:
            s[1] = self.arith.num(1)
        return s

    def _is_constant(self, u: Series) -> bool:
        return all(c == 0 for c in u[1:])

    def add(self, u: Series, v: Series) -> Series:
        return [a + b for a, b in zip(u, v)]

    def sub(self, u: Series, v: Series) -> Series:
        return [a - b for a, b in zip(u, v)]

    def scale(self, u: Series, s) -> Series:
        return [a * s for a in u]

    def mul(self, u: Series, v: Series) -> Series:
        return [sum((u[j] * v[k - j] for j in range(k + 1)), self.arith.num(0)) for k in range(self.size)]

    def div(self, u: Series, v: Series) -> Series:
        if v[0] == 0:
            raise EvalError("division by zero")
        q: Series = []
        for k in range(self.size):
            acc = u[k]
            for j in range(k):
                acc = acc - q[j] * v[k - j]
            q.append(acc / v[0])
        return q

    def pow_nat(self, u: Series, n: int) -> Series:
        result = self.constant(1)
        base = u
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def exp(self, u: Series) -> Series:
        y = [self.arith.exp(u[0])]
        for k in range(1, self.size):
            y.append(sum((j * u[j] * y[k - j] for j in range(1, k + 1)), self.arith.num(0)) / k)
        return y

    def log(self, u: Series) -> Series:
        if u[0] <= 0:
            raise EvalError(f"ln of non-positive argument {float(u[0])!r}")
        y = [self.arith.log(u[0])]
        for k in range(1, self.size):
            acc = sum((j * y[j] * u[k - j] for j in range(1, k)), self.arith.num(0)) / k
            y.append((u[k] - acc) / u[0])
        return y

    def sin_cos(self, u: Series) -> tuple[Series, Series]:
        s = [self.arith.sin(u[0])]
        c = [self.arith.cos(u[0])]
        for k in range(1, self.size):
            s.append(sum((j * u[j] * c[k - j] for j in range(1, k + 1)), self.arith.num(0)) / k)
            c.append(-sum((j * u[j] * s[k - j] for j in range(1, k + 1)), self.arith.num(0)) / k)
        return s, c

    def sqrt(self, u: Series) -> Series:
        if u[0] < 0:
            raise EvalError(f"sqrt of negative argument {float(u[0])!r}")
        if u[0] == 0 and self.order >= 1 and not self._is_constant(u):
            raise NonSmoothError("sqrt", 0.0)
        y = [self.arith.sqrt(u[0])]
        for k in range(1, self.size):
            acc = u[k] - sum((y[j] * y[k - j] for j in range(1, k)), self.arith.num(0))
            y.append(acc / (2 * y[0]))
        return y

    # -- tree evaluation ------------------------------------------------

    def _kink(self, what: str, u: Series, at_kink: bool) -> None:
        if at_kink and self.order >= 1 and not self._is_constant(u):
            raise NonSmoothError(what, float(u[0]))

    def _piecewise_constant(self, what: str, u: Series, value) -> Series:
        x = u[0]
        self._kink(what, u, x == self.arith.floor(x))
        return self.constant(value)

    def _integer(self, u: Series, what: str) -> int:
        if not self._is_constant(u):
            raise EvalError(f"{what} must not depend on the differentiation variable")
        value = u[0]
        if value != self.arith.floor(value):
            raise EvalError(f"{what} must be an integer, got {float(value)!r}")
        return int(self.arith.floor(value))

    def _vector(self, name: str, jets: Mapping[str, Series]) -> Vec:
        if name in jets:
            raise EvalError(f"{name} is differentiated as a vector")
        vec = self.env.get(name)
        if not isinstance(vec, Vec):
            raise EvalError(f"{name} is not a bound vector")
        return vec

    def _apply(self, name: str, u: Series) -> Series:
        fn = self.funcs.get(name)
        if fn is None:
            raise EvalError(f"unknown function: {name}")
        return self.eval(fn.body, {fn.formal: u}, closed=True)

    def eval(self, e: Expr, jets: Mapping[str, Series], closed: bool = False) -> Series:
        """Jet of `e`, with variables in `jets` carrying series; others are constants from env."""
        match e:
            case Const(value=v) | NatConst(value=v):
                return self.constant(v)
            case Var(name=name):
                if name in jets:
                    return jets[name]
                if not closed and name in self.env:
                    value = self.env[name]
                    if isinstance(value, Vec):
                        raise EvalError(f"vector {name} used as a number")
                    return self.constant(value.value)
                raise EvalError(f"unbound variable: {name}")
            case Unary(op=op, arg=arg):
                return self._unary(op, self.eval(arg, jets, closed))
            case Binary(op=op, left=left, right=right):
                return self._binary(op, self.eval(left, jets, closed), self.eval(right, jets, closed))
            case PowNat(base=base, exponent=k):
                return self.pow_nat(self.eval(base, jets, closed), k)
            case Apply(name=name, arg=arg):
                return self._apply(name, self.eval(arg, jets, closed))
            case Index(name=name, index=index):
                i = self._integer(self.eval(index, jets, closed), f"index of {name}")
                return self.constant(self._vector(name, jets).get(i))
            case Card(name=name):
                return self.constant(len(self._vector(name, jets)))
            case Iterate(name=name, count=count, arg=arg):
                n = self._integer(self.eval(count, jets, closed), f"iterate count of {name}")
                if n < 0:
                    raise EvalError(f"negative iterate count {n}")
                u = self.eval(arg, jets, closed)
                for _ in range(n):
                    u = self._apply(name, u)
                return u
        raise EvalError(f"cannot differentiate {e!r}")

    def _unary(self, op: UnaryOp, u: Series) -> Series:
        a = self.arith
        x = u[0]
        match op:
            case UnaryOp.NEG:
                return [-c for c in u]
            case UnaryOp.ABS:
                self._kink("|.|", u, x == 0)
                return [-c for c in u] if x < 0 else list(u)
            case UnaryOp.FLOOR:
                return self._piecewise_constant("floor", u, a.floor(x))
            case UnaryOp.CEIL:
                return self._piecewise_constant("ceil", u, a.ceil(x))
            case UnaryOp.NAT:
                if x < 0:
                    return self.constant(0)
                return self._piecewise_constant("nat", u, a.floor(x))
            case UnaryOp.EXP:
                return self.exp(u)
            case UnaryOp.LN:
                return self.log(u)
            case UnaryOp.LOG2:
                return self.scale(self.log(u), 1 / a.log(a.num(2)))
            case UnaryOp.SIN:
                return self.sin_cos(u)[0]
            case UnaryOp.COS:
                return self.sin_cos(u)[1]
            case UnaryOp.SQRT:
                return self.sqrt(u)
            case UnaryOp.ULP:
                return self.constant(a.ulp(x))
        raise EvalError(f"cannot differentiate {op.value}")

    def _binary(self, op: BinOp, u: Series, v: Series) -> Series:
        match op:
            case BinOp.ADD:
                return self.add(u, v)
            case BinOp.SUB:
                return self.sub(u, v)
            case BinOp.MUL:
                return self.mul(u, v)
            case BinOp.DIV:
                return self.div(u, v)
            case BinOp.MIN | BinOp.MAX:
                if u[0] == v[0] and u != v:
                    self._kink(op.value, self.sub(u, v), True)
                pick_u = (u[0] < v[0]) if op is BinOp.MIN else (u[0] > v[0])
                return list(u if pick_u or u == v else v)
            case BinOp.POW:
                if self._is_constant(v) and v[0] == self.arith.floor(v[0]):
                    n = int(self.arith.floor(v[0]))
                    if n >= 0:
                        return self.pow_nat(u, n)
                    return self.div(self.constant(1), self.pow_nat(u, -n))
                if u[0] <= 0:
                    raise EvalError(f"non-integer power of non-positive base {float(u[0])!r}")
                return self.exp(self.mul(v, self.log(u)))
        raise EvalError(f"cannot differentiate {op.value}")


def jet_eval(
    e: Expr,
    var: str,
    a: float,
    order: int,
    env: Optional[Mapping[str, Value]] = None,
    funcs: Optional[Mapping[str, FunctionDef]] = None,
    arith=FLOAT,
) -> Jet:
    """Jet of `e` in `var` at `a` to the given order."""
    cap = get_settings().diff.max_order
    if order > cap:
        raise ValueError(f"jet order {order} exceeds the configured cap {cap}")
    evaluator = JetEvaluator(order, arith, env, funcs)
    try:
        series = evaluator.eval(e, {var: evaluator.variable(a)})
    except (OverflowError, ValueError, ZeroDivisionError) as err:
        raise EvalError(f"jet of order {order} at {a!r}: {err}") from err
    return Jet(point=a, coeffs=tuple(series))


def nth_derivative(
    e: Expr,
    var: str,
    n: int,
    a: float,
    env: Optional[Mapping[str, Value]] = None,
    funcs: Optional[Mapping[str, FunctionDef]] = None,
) -> float:
    """n-th derivative of `e` in `var` at `a`, read off the order-n jet."""
    return jet_eval(e, var, a, n, env, funcs).derivative(n)


def value_at(e: Expr, var: str, x, arith, env=None, funcs=None):
    """Value of `e` at x in the given arithmetic (an order-0 jet)."""
    evaluator = JetEvaluator(0, arith, env, funcs)
    try:
        return evaluator.eval(e, {var: evaluator.constant(x)})[0]
    except (OverflowError, ValueError, ZeroDivisionError) as err:
        raise EvalError(f"value at {x!r}: {err}") from err


def is_differentiable(e: Expr, var: str, a: float, k: int, env=None, funcs=None) -> bool:
    """Jets of order k exist at a (a sufficient condition for k-fold differentiability)."""
    try:
        jet_eval(e, var, a, k, env, funcs)
    except EvalError:
        return False
    return True
