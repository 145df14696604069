"""
Canonical pretty-printer for the program notation.

Output uses the Unicode operators (≤, ≠, ∧, ∨, ¬, ⟶, ∀, ∃) and the minimal
parentheses the parser needs, so that parsing printed text gives back the
tree it was printed from.
"""

from .ast import (
    Const, NatConst, Var, Unary, Binary, PowNat, Apply, Index, Card, Iterate,
    BoolConst, Compare, Not, Logic, Quant,
    UnaryOp, BinOp, LogicOp,
    Stmt, Skip, Assign, VecAssign, Seq, If, While, Program, Sort, Node,
)

ATOM = 100

BINARY_PREC = {
    BinOp.ADD: 60, BinOp.SUB: 60,
    BinOp.MUL: 70, BinOp.DIV: 70,
    BinOp.POW: 90,
}
LOGIC_PREC = {LogicOp.IMPLIES: 10, LogicOp.OR: 20, LogicOp.AND: 30}

FUNCTION_SPELLING = {
    UnaryOp.LOG2: "log2", UnaryOp.EXP: "exp", UnaryOp.LN: "ln",
    UnaryOp.SIN: "sin", UnaryOp.COS: "cos", UnaryOp.SQRT: "sqrt",
    UnaryOp.NAT: "nat", UnaryOp.ULP: "ulp",
}


def _precedence(node: Node) -> int:
    match node:
        case Const(value=v) if v < 0 or str(v).startswith("-"):
            return 0    # always parenthesised as an operand
        case Binary(op=op) if op in BINARY_PREC:
            return BINARY_PREC[op]
        case PowNat():
            return 90
        case Unary(op=UnaryOp.NEG):
            return 80
        case Compare():
            return 50
        case Not():
            return 40
        case Logic(op=op):
            return LOGIC_PREC[op]
        case Quant():
            return 0
    return ATOM


def _wrap(node: Node, min_prec: int) -> str:
    text = show(node)
    return f"({text})" if _precedence(node) < min_prec else text


def _float(value: float) -> str:
    text = repr(value)
    if text in ("inf", "-inf", "nan"):
        raise ValueError(f"non-finite constant {text} has no source form")
    return text


def show(node: Node) -> str:
    """Source text of an expression or condition."""
    match node:
        case Const(value=v):
            return _float(v)
        case NatConst(value=v):
            return str(v)
        case Var(name=name):
            return name
        case Unary(op=UnaryOp.NEG, arg=arg):
            inner = _wrap(arg, 80)
            # "-2.0" would read back as a negative literal
            if inner.startswith("-") or isinstance(arg, (Const, NatConst)):
                return f"-({inner})"
            return f"-{inner}"
        case Unary(op=UnaryOp.ABS, arg=arg):
            inner = show(arg)
            if inner.startswith("|") or inner.endswith("|"):
                return f"abs({inner})"
            return f"|{inner}|"
        case Unary(op=UnaryOp.FLOOR, arg=arg):
            return f"⌊{show(arg)}⌋"
        case Unary(op=UnaryOp.CEIL, arg=arg):
            return f"⌈{show(arg)}⌉"
        case Unary(op=op, arg=arg):
            return f"{FUNCTION_SPELLING[op]}({show(arg)})"
        case Binary(op=BinOp.MIN | BinOp.MAX as op, left=left, right=right):
            return f"{op.value}({show(left)}, {show(right)})"
        case Binary(op=BinOp.POW, left=left, right=right):
            return f"{_wrap(left, 91)} ^ {_wrap(right, 90)}"
        case Binary(op=op, left=left, right=right):
            prec = BINARY_PREC[op]
            return f"{_wrap(left, prec)} {op.value} {_wrap(right, prec + 1)}"
        case PowNat(base=base, exponent=k):
            return f"{_wrap(base, 91)} ^ {k}"
        case Apply(name=name, arg=arg):
            return f"{name}({show(arg)})"
        case Index(name=name, index=index):
            return f"{name}[{show(index)}]"
        case Card(name=name):
            return f"card({name})"
        case Iterate(name=name, count=count, arg=arg):
            return f"({name} ^^ {show(count)})({show(arg)})"
        case BoolConst(value=v):
            return "true" if v else "false"
        case Compare(op=op, left=left, right=right):
            return f"{_wrap(left, 51)} {op.value} {_wrap(right, 51)}"
        case Not(arg=arg):
            return f"¬{_wrap(arg, 40)}"
        case Logic(op=op, left=left, right=right):
            prec = LOGIC_PREC[op]
            return f"{_wrap(left, prec + 1)} {op.value} {_wrap(right, prec)}"
        case Quant(kind=kind, var=var, bound=bound, body=body):
            head = f"{kind.value} {var}" if bound is None else f"{kind.value} {var} < {_wrap(bound, 51)}"
            return f"{head}. {show(body)}"
    raise TypeError(f"cannot print {node!r}")


def show_stmt(stmt: Stmt, indent: int = 1) -> str:
    """Source text of a statement, one simple statement per line."""
    pad = "  " * indent
    match stmt:
        case Skip():
            return f"{pad}skip"
        case Assign(name=name, expr=e):
            return f"{pad}{name} := {show(e)}"
        case VecAssign(name=name, index=index, expr=e):
            return f"{pad}{name}[{show(index)}] := {show(e)}"
        case Seq(stmts=stmts):
            return ";\n".join(show_stmt(s, indent) for s in stmts)
        case If(cond=c, then=then, orelse=orelse):
            lines = [f"{pad}if {show(c)}", f"{pad}then", show_stmt(then, indent + 1)]
            if not isinstance(orelse, Skip):
                lines += [f"{pad}else", show_stmt(orelse, indent + 1)]
            lines.append(f"{pad}fi")
            return "\n".join(lines)
        case While(guard=g, invariant=inv, variant=var, body=body):
            return "\n".join([
                f"{pad}while {show(g)}",
                f"{pad}invariant {show(inv)}",
                f"{pad}variant {show(var)}",
                f"{pad}do",
                show_stmt(body, indent + 1),
                f"{pad}od",
            ])
    raise TypeError(f"cannot print {stmt!r}")


def _show_param(p) -> str:
    if p.sort is Sort.VEC:
        return f"{p.name}::vec[{p.length}]"
    return f"{p.name}::{p.sort.value}"


def show_program(program: Program) -> str:
    """Source text of a whole program declaration."""
    params = ", ".join(_show_param(p) for p in program.params)
    return f'program {program.name} ({params}) = "\n{show_stmt(program.body)}\n"\n'
