"""
Abstract syntax of the guarded-command program notation.

Expressions (Expr) denote reals, nats or vectors; conditions (Cond) denote
booleans; statements (Stmt) are skip, assignment, sequencing, if and
annotated while. All nodes are frozen dataclasses and compare structurally.

Expressions overload the arithmetic operators so trees can be built directly:

    >>> x = Var("x")
    >>> x ** 2 - 2
    Binary(op=<BinOp.SUB: '-'>, left=PowNat(base=Var(name='x'), exponent=2), right=NatConst(value=2))
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union


class Sort(Enum):
    REAL = "real"
    NAT = "nat"
    VEC = "vec"
    FUN = "fun"


class UnaryOp(Enum):
    NEG = "-"
    ABS = "abs"
    FLOOR = "floor"
    CEIL = "ceil"
    LOG2 = "log2"
    EXP = "exp"
    LN = "ln"
    SIN = "sin"
    COS = "cos"
    SQRT = "sqrt"
    NAT = "nat"    # floor clamped at 0
    ULP = "ulp"


class BinOp(Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    MIN = "min"
    MAX = "max"
    POW = "^"      # non-literal exponent


class CmpOp(Enum):
    LT = "<"
    LE = "≤"
    EQ = "="
    NE = "≠"


class LogicOp(Enum):
    AND = "∧"
    OR = "∨"
    IMPLIES = "⟶"


class QuantKind(Enum):
    FORALL = "∀"
    EXISTS = "∃"


# =============================================================================
# Expressions
# =============================================================================

def _lift(value) -> "Expr":
    if isinstance(value, Expr):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are conditions, not expressions")
    if isinstance(value, int):
        return NatConst(value) if value >= 0 else Const(float(value))
    if isinstance(value, float):
        return Const(value)
    raise TypeError(f"cannot use {value!r} as an expression")


class Expr:
    """Base class of expression nodes."""

    def __add__(self, other): return Binary(BinOp.ADD, self, _lift(other))
    def __radd__(self, other): return Binary(BinOp.ADD, _lift(other), self)
    def __sub__(self, other): return Binary(BinOp.SUB, self, _lift(other))
    def __rsub__(self, other): return Binary(BinOp.SUB, _lift(other), self)
    def __mul__(self, other): return Binary(BinOp.MUL, self, _lift(other))
    def __rmul__(self, other): return Binary(BinOp.MUL, _lift(other), self)
    def __truediv__(self, other): return Binary(BinOp.DIV, self, _lift(other))
    def __rtruediv__(self, other): return Binary(BinOp.DIV, _lift(other), self)
    def __neg__(self): return Unary(UnaryOp.NEG, self)

    def __pow__(self, exponent):
        if isinstance(exponent, int) and not isinstance(exponent, bool) and exponent >= 0:
            return PowNat(self, exponent)
        return Binary(BinOp.POW, self, _lift(exponent))


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class NatConst(Expr):
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError(f"NatConst must be nonnegative, got {self.value}")


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")


@dataclass(frozen=True)
class Unary(Expr):
    op: UnaryOp
    arg: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: BinOp
    left: Expr
    right: Expr


@dataclass(frozen=True)
class PowNat(Expr):
    """Power with a literal nonnegative integer exponent."""
    base: Expr
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError(f"PowNat exponent must be a nonnegative int, got {self.exponent!r}")


@dataclass(frozen=True)
class Apply(Expr):
    """Application of a named single-argument function."""
    name: str
    arg: Expr

    def __post_init__(self):
        if not self.name:
            raise ValueError("function name must be nonempty")


@dataclass(frozen=True)
class Index(Expr):
    """Element `index` of the vector variable `name`."""
    name: str
    index: Expr


@dataclass(frozen=True)
class Card(Expr):
    """Length of the vector variable `name`."""
    name: str


@dataclass(frozen=True)
class Iterate(Expr):
    """`(name ^^ count) arg`: the count-fold iterate of a named function."""
    name: str
    count: Expr
    arg: Expr


# Convenience constructors named after the node kinds of the notation.

def Neg(arg) -> Expr: return Unary(UnaryOp.NEG, _lift(arg))
def Abs(arg) -> Expr: return Unary(UnaryOp.ABS, _lift(arg))
def Floor(arg) -> Expr: return Unary(UnaryOp.FLOOR, _lift(arg))
def Ceil(arg) -> Expr: return Unary(UnaryOp.CEIL, _lift(arg))
def Log2(arg) -> Expr: return Unary(UnaryOp.LOG2, _lift(arg))
def Exp(arg) -> Expr: return Unary(UnaryOp.EXP, _lift(arg))
def Ln(arg) -> Expr: return Unary(UnaryOp.LN, _lift(arg))
def Sin(arg) -> Expr: return Unary(UnaryOp.SIN, _lift(arg))
def Cos(arg) -> Expr: return Unary(UnaryOp.COS, _lift(arg))
def Sqrt(arg) -> Expr: return Unary(UnaryOp.SQRT, _lift(arg))
def NatOf(arg) -> Expr: return Unary(UnaryOp.NAT, _lift(arg))
def Min(a, b) -> Expr: return Binary(BinOp.MIN, _lift(a), _lift(b))
def Max(a, b) -> Expr: return Binary(BinOp.MAX, _lift(a), _lift(b))


# =============================================================================
# Conditions
# =============================================================================

class Cond:
    """Base class of condition nodes."""

    def __and__(self, other): return Logic(LogicOp.AND, self, other)
    def __or__(self, other): return Logic(LogicOp.OR, self, other)
    def __invert__(self): return Not(self)


@dataclass(frozen=True)
class BoolConst(Cond):
    value: bool


@dataclass(frozen=True)
class Compare(Cond):
    op: CmpOp
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not(Cond):
    arg: Cond


@dataclass(frozen=True)
class Logic(Cond):
    op: LogicOp
    left: Cond
    right: Cond


@dataclass(frozen=True)
class Quant(Cond):
    """Quantifier; `bound` is None only for real existentials (need witnesses)."""
    kind: QuantKind
    var: str
    bound: Optional[Expr]
    body: Cond

    def __post_init__(self):
        if self.bound is None and self.kind is not QuantKind.EXISTS:
            raise ValueError("unbounded quantifiers must be existential")


TRUE = BoolConst(True)
FALSE = BoolConst(False)


def conjunction(parts: list[Cond]) -> Cond:
    """Right-nested conjunction; TRUE for an empty list."""
    if not parts:
        return TRUE
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Logic(LogicOp.AND, part, result)
    return result


def conjuncts(cond: Cond) -> list[Cond]:
    """Flatten nested conjunctions."""
    if isinstance(cond, Logic) and cond.op is LogicOp.AND:
        return conjuncts(cond.left) + conjuncts(cond.right)
    return [cond]


# =============================================================================
# Statements and programs
# =============================================================================

class Stmt:
    """Base class of statements."""


@dataclass(frozen=True)
class Skip(Stmt):
    pass


@dataclass(frozen=True)
class Assign(Stmt):
    name: str
    expr: Expr


@dataclass(frozen=True)
class VecAssign(Stmt):
    name: str
    index: Expr
    expr: Expr


@dataclass(frozen=True)
class Seq(Stmt):
    stmts: tuple[Stmt, ...]


@dataclass(frozen=True)
class If(Stmt):
    cond: Cond
    then: Stmt
    orelse: Stmt = field(default_factory=Skip)


@dataclass(frozen=True)
class While(Stmt):
    guard: Cond
    invariant: Cond
    variant: Expr
    body: Stmt


@dataclass(frozen=True)
class Param:
    name: str
    sort: Sort
    length: Optional[int] = None  # vec[N] only

    def __post_init__(self):
        if not self.name:
            raise ValueError("parameter name must be nonempty")
        if self.sort is Sort.VEC and (self.length is None or self.length < 0):
            raise ValueError(f"vector parameter {self.name} needs a length")


@dataclass(frozen=True)
class FunctionDef:
    """Single-argument function bound to a `fun` parameter: formal ↦ body."""
    formal: str
    body: Expr
    source: str = ""


@dataclass(frozen=True)
class Program:
    name: str
    params: tuple[Param, ...]
    body: Stmt

    @property
    def param_names(self) -> list[str]:
        return [p.name for p in self.params]

    def param(self, name: str) -> Optional[Param]:
        return next((p for p in self.params if p.name == name), None)

    @property
    def locals(self) -> list[str]:
        """Assigned names that are not parameters, in order of first assignment."""
        params = set(self.param_names)
        seen: list[str] = []
        for stmt in walk_stmts(self.body):
            if isinstance(stmt, (Assign, VecAssign)) and stmt.name not in params and stmt.name not in seen:
                seen.append(stmt.name)
        return seen

    def loops(self) -> list[While]:
        """While statements in preorder; position is the loop id."""
        return [s for s in walk_stmts(self.body) if isinstance(s, While)]


Node = Union[Expr, Cond]


# =============================================================================
# Traversal
# =============================================================================

def walk_stmts(stmt: Stmt) -> Iterator[Stmt]:
    """Preorder traversal of statements."""
    yield stmt
    if isinstance(stmt, Seq):
        for s in stmt.stmts:
            yield from walk_stmts(s)
    elif isinstance(stmt, If):
        yield from walk_stmts(stmt.then)
        yield from walk_stmts(stmt.orelse)
    elif isinstance(stmt, While):
        yield from walk_stmts(stmt.body)


def children(node: Node) -> list[Node]:
    """Direct subexpressions/subconditions of a node."""
    match node:
        case Unary(arg=arg) | Apply(arg=arg) | Not(arg=arg):
            return [arg]
        case Binary(left=l, right=r) | Compare(left=l, right=r) | Logic(left=l, right=r):
            return [l, r]
        case PowNat(base=base):
            return [base]
        case Index(index=index):
            return [index]
        case Iterate(count=count, arg=arg):
            return [count, arg]
        case Quant(bound=bound, body=body):
            return ([bound] if bound is not None else []) + [body]
    return []


def free_vars(node: Node, bound: frozenset = frozenset()) -> set[str]:
    """Variables read by a node (vector names of Index/Card included)."""
    match node:
        case Var(name=name):
            return set() if name in bound else {name}
        case Index(name=name, index=index):
            return (set() if name in bound else {name}) | free_vars(index, bound)
        case Card(name=name):
            return set() if name in bound else {name}
        case Quant(var=var, bound=limit, body=body):
            names = free_vars(limit, bound) if limit is not None else set()
            return names | free_vars(body, bound | {var})
    names: set[str] = set()
    for child in children(node):
        names |= free_vars(child, bound)
    return names


def called_functions(node: Node) -> set[str]:
    """Names used as functions (Apply and Iterate targets)."""
    names = {node.name} if isinstance(node, (Apply, Iterate)) else set()
    for child in children(node):
        names |= called_functions(child)
    return names


def unbounded_existentials(cond: Cond) -> list[str]:
    """Variables of real existentials, which need witnesses to be checked."""
    found = []
    if isinstance(cond, Quant) and cond.bound is None:
        found.append(cond.var)
    for child in children(cond):
        if isinstance(child, Cond):
            found.extend(unbounded_existentials(child))
    return found


def function_def(body: Expr, source: str = "") -> FunctionDef:
    """Bind an expression as a function of its single free variable (default x)."""
    names = sorted(free_vars(body))
    formal = names[0] if len(names) == 1 else "x"
    return FunctionDef(formal=formal, body=body, source=source)
