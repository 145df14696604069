"""
Static well-formedness checks for programs.

Handles:
- Sort inference for locals (fixpoint over all assignments)
- Definite-assignment analysis: every variable read must be a parameter, a
  quantifier index, or assigned on every path before the read
- Variant sort (must be integer-valued), parameter/local disjointness,
  function and vector usage
"""

import logging
from dataclasses import dataclass
from enum import Enum

from .ast import (
    Expr, Const, NatConst, Var, Unary, Binary, PowNat, Apply, Index, Card, Iterate,
    UnaryOp, BinOp, Node,
    Stmt, Skip, Assign, VecAssign, Seq, If, While, Program, Sort,
    free_vars, called_functions, children, walk_stmts,
)
from .printer import show

logger = logging.getLogger(__name__)


class DiagnosticKind(Enum):
    UNBOUND_VARIABLE = "unbound-variable"
    VARIANT_SORT = "variant-sort"
    ASSIGNS_PARAMETER = "assigns-parameter"
    DUPLICATE_PARAMETER = "duplicate-parameter"
    UNKNOWN_FUNCTION = "unknown-function"
    NOT_A_VECTOR = "not-a-vector"


@dataclass(frozen=True)
class Diagnostic:
    kind: DiagnosticKind
    message: str

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.message}"


def expression_sort(e: Expr, sorts: dict[str, Sort]) -> Sort:
    """NAT when the expression is certainly a nonnegative integer, else REAL (or VEC for vectors)."""
    match e:
        case NatConst() | Card():
            return Sort.NAT
        case Const() | Apply() | Index() | Iterate():
            return Sort.REAL
        case Var(name=name):
            return sorts.get(name, Sort.REAL)
        case Unary(op=UnaryOp.NAT):
            return Sort.NAT
        case Unary(op=UnaryOp.ABS | UnaryOp.FLOOR | UnaryOp.CEIL, arg=arg):
            return Sort.NAT if expression_sort(arg, sorts) is Sort.NAT else Sort.REAL
        case Unary():
            return Sort.REAL
        case Binary(op=BinOp.DIV):
            return Sort.REAL
        case Binary(left=left, right=right):
            both = expression_sort(left, sorts) is Sort.NAT and expression_sort(right, sorts) is Sort.NAT
            return Sort.NAT if both else Sort.REAL
        case PowNat(base=base):
            return Sort.NAT if expression_sort(base, sorts) is Sort.NAT else Sort.REAL
    return Sort.REAL


def is_integer_valued(e: Expr, sorts: dict[str, Sort]) -> bool:
    """Integer-sorted: Nat-sorted, or built from floor/ceil by integer arithmetic."""
    if expression_sort(e, sorts) is Sort.NAT:
        return True
    match e:
        case Unary(op=UnaryOp.FLOOR | UnaryOp.CEIL):
            return True
        case Unary(op=UnaryOp.NEG | UnaryOp.ABS, arg=arg):
            return is_integer_valued(arg, sorts)
        case Binary(op=BinOp.ADD | BinOp.SUB | BinOp.MUL | BinOp.MIN | BinOp.MAX, left=left, right=right):
            return is_integer_valued(left, sorts) and is_integer_valued(right, sorts)
        case PowNat(base=base):
            return is_integer_valued(base, sorts)
    return False


def infer_sorts(program: Program) -> dict[str, Sort]:
    """Sorts of parameters and locals; a local is NAT only if every assignment to it is."""
    sorts = {p.name: p.sort for p in program.params}
    assignments: dict[str, list] = {}
    for stmt in walk_stmts(program.body):
        if isinstance(stmt, (Assign, VecAssign)) and stmt.name not in sorts:
            assignments.setdefault(stmt.name, []).append(stmt)

    local_sorts = {name: Sort.NAT for name in assignments}
    changed = True
    while changed:
        changed = False
        env = {**local_sorts, **sorts}
        for name, stmts in assignments.items():
            new = Sort.NAT
            for stmt in stmts:
                if isinstance(stmt, VecAssign):
                    new = Sort.VEC
                    break
                rhs = expression_sort(stmt.expr, env)
                if rhs is Sort.VEC or (isinstance(stmt.expr, Var) and env.get(stmt.expr.name) is Sort.VEC):
                    new = Sort.VEC
                    break
                if rhs is Sort.REAL:
                    new = Sort.REAL
            if new is not local_sorts[name]:
                local_sorts[name] = new
                changed = True
    return {**local_sorts, **sorts}


def _vector_uses(node: Node) -> set[str]:
    names = {node.name} if isinstance(node, (Index, Card)) else set()
    for child in children(node):
        names |= _vector_uses(child)
    return names


class _Checker:
    def __init__(self, program: Program):
        self.program = program
        self.sorts = infer_sorts(program)
        self.functions = {p.name for p in program.params if p.sort is Sort.FUN}
        self.diagnostics: list[Diagnostic] = []

    def report(self, kind: DiagnosticKind, message: str):
        self.diagnostics.append(Diagnostic(kind, message))

    def read(self, node: Node, defined: set[str], where: str):
        for name in sorted(free_vars(node) - defined - self.functions):
            self.report(DiagnosticKind.UNBOUND_VARIABLE, f"{name} is read in {where} before it is assigned")
        for name in sorted(called_functions(node) - self.functions):
            self.report(DiagnosticKind.UNKNOWN_FUNCTION, f"{name} is applied in {where} but is not a fun parameter")
        for name in sorted(_vector_uses(node)):
            if self.sorts.get(name, Sort.VEC) is not Sort.VEC:
                self.report(DiagnosticKind.NOT_A_VECTOR, f"{name} is indexed in {where} but has sort {self.sorts[name].value}")

    def stmt(self, s: Stmt, defined: set[str]) -> set[str]:
        match s:
            case Skip():
                return defined
            case Assign(name=name, expr=e):
                self.read(e, defined, f"the assignment to {name}")
                return defined | {name}
            case VecAssign(name=name, index=index, expr=e):
                where = f"the assignment to {name}[...]"
                if name not in defined:
                    self.report(DiagnosticKind.UNBOUND_VARIABLE, f"vector {name} is updated before it is assigned")
                self.read(index, defined, where)
                self.read(e, defined, where)
                return defined
            case Seq(stmts=stmts):
                for inner in stmts:
                    defined = self.stmt(inner, defined)
                return defined
            case If(cond=c, then=then, orelse=orelse):
                self.read(c, defined, "an if condition")
                return self.stmt(then, defined) & self.stmt(orelse, defined)
            case While(guard=g, invariant=inv, variant=var, body=body):
                self.read(g, defined, "a loop guard")
                self.read(inv, defined, "a loop invariant")
                self.read(var, defined, "a loop variant")
                if not is_integer_valued(var, self.sorts):
                    self.report(DiagnosticKind.VARIANT_SORT, f"variant is not integer-sorted: {show(var)}")
                self.stmt(body, defined)
                return defined
        return defined

    def run(self) -> list[Diagnostic]:
        seen = set()
        for p in self.program.params:
            if p.name in seen:
                self.report(DiagnosticKind.DUPLICATE_PARAMETER, f"parameter {p.name} is declared twice")
            seen.add(p.name)
        for stmt in walk_stmts(self.program.body):
            if isinstance(stmt, (Assign, VecAssign)) and stmt.name in seen:
                self.report(DiagnosticKind.ASSIGNS_PARAMETER, f"parameter {stmt.name} is assigned")
        self.stmt(self.program.body, set(seen))
        return self.diagnostics


def well_formed(program: Program) -> list[Diagnostic]:
    """Diagnostics for a program; empty when it is well formed."""
    diagnostics = _Checker(program).run()
    if diagnostics:
        logger.debug(f"{program.name}: {len(diagnostics)} diagnostic(s)")
    return diagnostics


