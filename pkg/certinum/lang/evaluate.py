"""
Denotation of expressions and conditions.

Reals are binary64, Nat arithmetic is exact (Nat - Nat truncates at 0),
division always yields a Real. A ceiling of a base-2 logarithm is exact:
its argument is evaluated in rationals when it is built from + - * / over
finite numbers, so a power of two is never rounded across. Conditions are
evaluated classically, left to right with short-circuiting; bounded
quantifiers are expanded over 0..bound-1.
"""

import math
from fractions import Fraction
from typing import Callable, Mapping, Optional

from ..errors import EvalError
from .ast import (
    Expr, Const, NatConst, Var, Unary, Binary, PowNat, Apply, Index, Card, Iterate,
    Cond, BoolConst, Compare, Not, Logic, Quant,
    UnaryOp, BinOp, CmpOp, LogicOp, QuantKind, FunctionDef,
)
from .values import Value, Real, Nat, Vec, is_integral

Env = Mapping[str, Value]
Funcs = Mapping[str, FunctionDef]


def _number(value: Value, what: str):
    if isinstance(value, Vec):
        raise EvalError(f"{what}: expected a number, got a vector")
    return value.value


def _integer(value: Value, what: str) -> int:
    _number(value, what)
    if not is_integral(value):
        raise EvalError(f"{what}: expected an integer, got {value.value!r}")
    return int(value.value)


def _int_value(k: int) -> Value:
    return Nat(k) if k >= 0 else Real(float(k))


def _unary(op: UnaryOp, value: Value) -> Value:
    x = _number(value, op.value)
    try:
        match op:
            case UnaryOp.NEG:
                return Real(-float(x))
            case UnaryOp.ABS:
                return Nat(x) if isinstance(value, Nat) else Real(abs(x))
            case UnaryOp.FLOOR:
                return value if isinstance(value, Nat) else _int_value(math.floor(x))
            case UnaryOp.CEIL:
                return value if isinstance(value, Nat) else _int_value(math.ceil(x))
            case UnaryOp.NAT:
                return Nat(max(math.floor(x), 0))
            case UnaryOp.LOG2 | UnaryOp.LN:
                if x <= 0:
                    raise EvalError(f"{op.value} of non-positive argument {x!r}")
                return Real(math.log2(x) if op is UnaryOp.LOG2 else math.log(x))
            case UnaryOp.EXP:
                return Real(math.exp(x))
            case UnaryOp.SIN:
                return Real(math.sin(x))
            case UnaryOp.COS:
                return Real(math.cos(x))
            case UnaryOp.SQRT:
                if x < 0:
                    raise EvalError(f"sqrt of negative argument {x!r}")
                return Real(math.sqrt(x))
            case UnaryOp.ULP:
                return Real(math.ulp(float(x)))
    except (OverflowError, ValueError) as e:
        raise EvalError(f"{op.value}({x!r}): {e}") from e
    raise EvalError(f"unknown unary operator {op}")


def _binary(op: BinOp, left: Value, right: Value) -> Value:
    a = _number(left, op.value)
    b = _number(right, op.value)
    both_nat = isinstance(left, Nat) and isinstance(right, Nat)
    try:
        match op:
            case BinOp.ADD:
                return Nat(a + b) if both_nat else Real(a + b)
            case BinOp.SUB:
                return Nat(max(a - b, 0)) if both_nat else Real(a - b)
            case BinOp.MUL:
                return Nat(a * b) if both_nat else Real(a * b)
            case BinOp.DIV:
                if b == 0:
                    raise EvalError("division by zero")
                return Real(a / b)
            case BinOp.MIN:
                return Nat(min(a, b)) if both_nat else Real(min(a, b))
            case BinOp.MAX:
                return Nat(max(a, b)) if both_nat else Real(max(a, b))
            case BinOp.POW:
                if is_integral(right):
                    k = int(b)
                    if both_nat:
                        return Nat(a ** k)
                    if a == 0 and k < 0:
                        raise EvalError("zero raised to a negative power")
                    return Real(float(a) ** k)
                if a <= 0:
                    raise EvalError(f"non-integer power of non-positive base {a!r}")
                return Real(float(a) ** b)
    except OverflowError as e:
        raise EvalError(f"{op.value}: {e}") from e
    raise EvalError(f"unknown binary operator {op}")


_EXACT_OPS = {
    BinOp.ADD: lambda a, b: a + b,
    BinOp.SUB: lambda a, b: a - b,
    BinOp.MUL: lambda a, b: a * b,
    BinOp.DIV: lambda a, b: a / b,
}


def _exact(e: Expr, env: Env) -> Optional[Fraction]:
    """Rational value of an arithmetic expression over finite numbers, or None when it has none."""
    match e:
        case Const(value=v) | NatConst(value=v):
            return Fraction(v) if math.isfinite(v) else None
        case Var(name=name):
            value = env.get(name)
            if isinstance(value, (Real, Nat)) and math.isfinite(value.value):
                return Fraction(value.value)
            return None
        case Unary(op=UnaryOp.NEG, arg=arg):
            q = _exact(arg, env)
            return -q if q is not None else None
        case Binary(op=op, left=left, right=right) if op in _EXACT_OPS:
            a = _exact(left, env)
            b = _exact(right, env)
            if a is None or b is None:
                return None
            # Nat monus and Real subtraction only agree when the difference is non-negative
            if op is BinOp.SUB and a < b:
                return None
            if op is BinOp.DIV:
                return a / b if b != 0 else None
            return _EXACT_OPS[op](a, b)
    return None


def ceil_log2(q: Fraction) -> int:
    """Least k with q <= 2^k, for positive rational q."""
    if q <= 0:
        raise EvalError(f"log2 of non-positive argument {float(q)!r}")
    k = q.numerator.bit_length() - q.denominator.bit_length()
    while q > Fraction(2) ** k:
        k += 1
    while q <= Fraction(2) ** (k - 1):
        k -= 1
    return k


def _ceil_of_log2(arg: Expr, env: Env, funcs: Funcs) -> Value:
    q = _exact(arg, env)
    if q is None:
        x = _number(eval_expr(arg, env, funcs), UnaryOp.LOG2.value)
        if not math.isfinite(x):
            return _unary(UnaryOp.CEIL, _unary(UnaryOp.LOG2, Real(x)))
        q = Fraction(x)
    return _int_value(ceil_log2(q))


def apply_function(name: str, arg: Value, funcs: Funcs) -> Value:
    """Call a bound function; its body sees only its formal parameter."""
    fn = funcs.get(name)
    if fn is None:
        raise EvalError(f"unknown function: {name}")
    return eval_expr(fn.body, {fn.formal: arg}, funcs)


def eval_expr(e: Expr, env: Env, funcs: Optional[Funcs] = None) -> Value:
    """Evaluate an expression in a variable environment; `funcs` binds Apply targets."""
    funcs = funcs or {}
    match e:
        case Const(value=v):
            return Real(v)
        case NatConst(value=v):
            return Nat(v)
        case Var(name=name):
            if name not in env:
                raise EvalError(f"unbound variable: {name}")
            return env[name]
        case Unary(op=UnaryOp.CEIL, arg=Unary(op=UnaryOp.LOG2, arg=inner)):
            return _ceil_of_log2(inner, env, funcs)
        case Unary(op=op, arg=arg):
            return _unary(op, eval_expr(arg, env, funcs))
        case Binary(op=op, left=left, right=right):
            return _binary(op, eval_expr(left, env, funcs), eval_expr(right, env, funcs))
        case PowNat(base=base, exponent=k):
            value = eval_expr(base, env, funcs)
            try:
                if isinstance(value, Nat):
                    return Nat(value.value ** k)
                return Real(_number(value, "^") ** k)
            except OverflowError as err:
                raise EvalError(f"^: {err}") from err
        case Apply(name=name, arg=arg):
            return apply_function(name, eval_expr(arg, env, funcs), funcs)
        case Index(name=name, index=index):
            vec = env.get(name)
            if not isinstance(vec, Vec):
                raise EvalError(f"{name} is not a bound vector")
            i = _integer(eval_expr(index, env, funcs), f"index of {name}")
            return Real(vec.get(i))
        case Card(name=name):
            vec = env.get(name)
            if not isinstance(vec, Vec):
                raise EvalError(f"{name} is not a bound vector")
            return Nat(len(vec))
        case Iterate(name=name, count=count, arg=arg):
            n = _integer(eval_expr(count, env, funcs), f"iterate count of {name}")
            if n < 0:
                raise EvalError(f"negative iterate count {n}")
            value = eval_expr(arg, env, funcs)
            for _ in range(n):
                value = apply_function(name, value, funcs)
            return value
    raise EvalError(f"not an expression: {e!r}")


def eval_real(e: Expr, env: Env, funcs: Optional[Funcs] = None) -> float:
    """eval_expr, coerced to a Python float."""
    return float(_number(eval_expr(e, env, funcs), "expression"))


def _compare(op: CmpOp, left: Value, right: Value) -> bool:
    if isinstance(left, Vec) or isinstance(right, Vec):
        if op not in (CmpOp.EQ, CmpOp.NE) or not (isinstance(left, Vec) and isinstance(right, Vec)):
            raise EvalError(f"cannot compare vectors with {op.value}")
        equal = left.items == right.items
        return equal if op is CmpOp.EQ else not equal
    a, b = left.value, right.value
    match op:
        case CmpOp.LT:
            return a < b
        case CmpOp.LE:
            return a <= b
        case CmpOp.EQ:
            return a == b
        case CmpOp.NE:
            return a != b
    raise EvalError(f"unknown comparison {op}")


def eval_cond(
    c: Cond,
    env: Env,
    funcs: Optional[Funcs] = None,
    witnesses: Optional[Mapping[str, Value]] = None,
) -> bool:
    """Evaluate a condition; real existentials take their value from `witnesses`."""
    funcs = funcs or {}
    match c:
        case BoolConst(value=v):
            return v
        case Compare(op=op, left=left, right=right):
            return _compare(op, eval_expr(left, env, funcs), eval_expr(right, env, funcs))
        case Not(arg=arg):
            return not eval_cond(arg, env, funcs, witnesses)
        case Logic(op=LogicOp.AND, left=left, right=right):
            return eval_cond(left, env, funcs, witnesses) and eval_cond(right, env, funcs, witnesses)
        case Logic(op=LogicOp.OR, left=left, right=right):
            return eval_cond(left, env, funcs, witnesses) or eval_cond(right, env, funcs, witnesses)
        case Logic(op=LogicOp.IMPLIES, left=left, right=right):
            return (not eval_cond(left, env, funcs, witnesses)) or eval_cond(right, env, funcs, witnesses)
        case Quant(kind=kind, var=var, bound=None, body=body):
            if witnesses is None or var not in witnesses:
                raise EvalError(f"no witness for existential {var}")
            return eval_cond(body, {**env, var: witnesses[var]}, funcs, witnesses)
        case Quant(kind=kind, var=var, bound=bound, body=body):
            n = _integer(eval_expr(bound, env, funcs), f"bound of {var}")
            if n < 0:
                raise EvalError(f"negative quantifier bound {n}")
            results = (eval_cond(body, {**env, var: Nat(k)}, funcs, witnesses) for k in range(n))
            return all(results) if kind is QuantKind.FORALL else any(results)
    raise EvalError(f"not a condition: {c!r}")


def as_function(f, var: str = "x", env: Optional[Env] = None, funcs: Optional[Funcs] = None) -> Callable[[float], float]:
    """A float -> float callable from an Expr, FunctionDef, source text or callable."""
    if isinstance(f, str):
        from .parser import parse_expr
        f = parse_expr(f, functions=funcs or ())
    if isinstance(f, FunctionDef):
        body, formal = f.body, f.formal
    elif isinstance(f, Expr):
        body, formal = f, var
    elif callable(f):
        return f
    else:
        raise TypeError(f"cannot use {f!r} as a function")
    base = dict(env or {})

    def call(x: float) -> float:
        return eval_real(body, {**base, formal: Real(x)}, funcs)

    return call
