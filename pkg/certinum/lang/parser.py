"""
Parser for the program notation.

Handles:
- Tokenizing with line/column positions (`--` comments open at a line start or after whitespace;
  Unicode and ASCII operators)
- One precedence-climbing parser for expressions and conditions
- Statements and `program NAME (params) = "body"` declarations

Function application may be written `f(x)` or `f x` and vector indexing
`X(i)`, `X i` or `X[i]`; juxtaposition is only recognised for names the parser
knows to be functions or vectors (parameters of sort fun / vec, and locals
assigned from vectors).
"""

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from ..errors import ParseError
from .ast import (
    Expr, Const, NatConst, Var, Unary, Binary, PowNat, Apply, Index, Card, Iterate,
    Cond, BoolConst, Compare, Not, Logic, Quant,
    UnaryOp, BinOp, CmpOp, LogicOp, QuantKind,
    Stmt, Skip, Assign, VecAssign, Seq, If, While, Param, Program, Sort, Node,
)

TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<comment>(?<!\S)--(?!>)[^\n]*)
    |(?P<num>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)
    |(?P<name>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<sym>-->|==>|:=|::|<=|>=|!=|==|&&|\|\||\^\^|=>|[-+*/^<>=(),;.\[\]|"¦⌈⌉⌊⌋≤≥≠∧∨¬⟶→∀∃⇒·×−])
    """,
    re.VERBOSE,
)

SYMBOL_ALIASES = {
    "<=": "≤", ">=": "≥", "!=": "≠", "==": "=",
    "&&": "∧", "||": "∨", "-->": "⟶", "==>": "⟶", "→": "⟶",
    "−": "-", "·": "*", "×": "*", "¦": "|", "=>": "⇒",
}

WORD_OPERATORS = {
    "and": "∧", "or": "∨", "not": "¬", "implies": "⟶",
    "forall": "∀", "exists": "∃",
}

KEYWORDS = {
    "program", "over", "skip", "if", "then", "else", "fi",
    "while", "invariant", "variant", "do", "od", "true", "false",
}

UNARY_BUILTINS = {
    "abs": UnaryOp.ABS, "floor": UnaryOp.FLOOR, "ceil": UnaryOp.CEIL,
    "log2": UnaryOp.LOG2, "exp": UnaryOp.EXP, "ln": UnaryOp.LN,
    "sin": UnaryOp.SIN, "cos": UnaryOp.COS, "sqrt": UnaryOp.SQRT,
    "nat": UnaryOp.NAT, "ulp": UnaryOp.ULP,
}

BINARY_BUILTINS = {"min": BinOp.MIN, "max": BinOp.MAX}

# Binding powers: (left binding power, right associative)
INFIX = {
    "⟶": (10, True),
    "∨": (20, True),
    "∧": (30, True),
    "<": (50, False), "≤": (50, False), "=": (50, False), "≠": (50, False),
    ">": (50, False), "≥": (50, False),
    "+": (60, False), "-": (60, False),
    "*": (70, False), "/": (70, False),
    "^": (90, True),
}
NOT_BP = 40
NEG_BP = 80
APPLY_BP = 100

ARITH = {"+": BinOp.ADD, "-": BinOp.SUB, "*": BinOp.MUL, "/": BinOp.DIV}
LOGIC = {"∧": LogicOp.AND, "∨": LogicOp.OR, "⟶": LogicOp.IMPLIES}
COMPARE = {"<": CmpOp.LT, "≤": CmpOp.LE, "=": CmpOp.EQ, "≠": CmpOp.NE}
SWAPPED = {">": CmpOp.LT, "≥": CmpOp.LE}


@dataclass(frozen=True)
class Token:
    kind: str       # num | name | sym | eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    """Split source text into tokens, dropping whitespace and comments."""
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        column = pos - line_start + 1
        if kind == "sym":
            tokens.append(Token("sym", SYMBOL_ALIASES.get(value, value), line, column))
        elif kind == "name" and value in WORD_OPERATORS:
            tokens.append(Token("sym", WORD_OPERATORS[value], line, column))
        elif kind in ("num", "name"):
            tokens.append(Token(kind, value, line, column))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    """Recursive-descent / precedence-climbing parser over a token list."""

    def __init__(self, text: str, functions: Iterable[str] = (), vectors: Iterable[str] = ()):
        self.tokens = tokenize(text)
        self.pos = 0
        self.functions = set(functions)
        self.vectors = set(vectors)

    # -- token helpers --------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok.kind in ("sym", "name") and tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def expect_name(self) -> str:
        tok = self.peek()
        if tok.kind != "name" or tok.text in KEYWORDS:
            self.error("expected a name")
        return self.advance().text

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", tok.line, tok.column)

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    def starts_primary(self) -> bool:
        tok = self.peek()
        if tok.kind == "num":
            return True
        if tok.kind == "name":
            return tok.text not in KEYWORDS
        return tok.kind == "sym" and tok.text in ("(", "⌈", "⌊")

    # -- expressions and conditions -------------------------------------

    def parse_node(self, min_bp: int = 0) -> Node:
        left = self._prefix(self.advance())
        while True:
            tok = self.peek()
            info = INFIX.get(tok.text) if tok.kind == "sym" else None
            if info is None or info[0] <= min_bp:
                return left
            lbp, right_assoc = info
            self.advance()
            right = self.parse_node(lbp - 1 if right_assoc else lbp)
            left = self._infix(tok, left, right)

    def expr(self, min_bp: int = 0) -> Expr:
        tok = self.peek()
        node = self.parse_node(min_bp)
        if not isinstance(node, Expr):
            self.error("expected an expression, got a condition", tok)
        return node

    def cond(self, min_bp: int = 0) -> Cond:
        tok = self.peek()
        node = self.parse_node(min_bp)
        if not isinstance(node, Cond):
            self.error("expected a condition, got an expression", tok)
        return node

    def _infix(self, tok: Token, left: Node, right: Node) -> Node:
        op = tok.text
        if op in LOGIC:
            if not (isinstance(left, Cond) and isinstance(right, Cond)):
                self.error(f"operands of {op} must be conditions", tok)
            return Logic(LOGIC[op], left, right)
        if not (isinstance(left, Expr) and isinstance(right, Expr)):
            self.error(f"operands of {op} must be expressions", tok)
        if op in COMPARE:
            return Compare(COMPARE[op], left, right)
        if op in SWAPPED:
            return Compare(SWAPPED[op], right, left)
        if op == "^":
            if isinstance(right, NatConst):
                return PowNat(left, right.value)
            return Binary(BinOp.POW, left, right)
        return Binary(ARITH[op], left, right)

    def _argument(self) -> Expr:
        """Argument of an application: parenthesised, or a juxtaposed primary."""
        if self.at("("):
            self.advance()
            arg = self.expr()
            self.expect(")")
            return arg
        if self.starts_primary():
            return self.expr(APPLY_BP)
        self.error("expected an argument")

    def _prefix(self, tok: Token) -> Node:
        if tok.kind == "num":
            if re.fullmatch(r"\d+", tok.text):
                return NatConst(int(tok.text))
            return Const(float(tok.text))
        if tok.kind == "name":
            return self._name(tok)
        match tok.text:
            case "-":
                nxt = self.peek()
                if nxt.kind == "num" and not self.at("^", 1):
                    self.advance()
                    return Const(-float(nxt.text))
                return Unary(UnaryOp.NEG, self.expr(NEG_BP))
            case "¬":
                return Not(self.cond(NOT_BP))
            case "|":
                inner = self.expr()
                self.expect("|")
                return Unary(UnaryOp.ABS, inner)
            case "⌈":
                inner = self.expr()
                self.expect("⌉")
                return Unary(UnaryOp.CEIL, inner)
            case "⌊":
                inner = self.expr()
                self.expect("⌋")
                return Unary(UnaryOp.FLOOR, inner)
            case "(":
                if self.peek().kind == "name" and self.at("^^", 1):
                    return self._iterate()
                node = self.parse_node()
                self.expect(")")
                return node
            case "∀" | "∃":
                return self._quantifier(QuantKind.FORALL if tok.text == "∀" else QuantKind.EXISTS)
        self.error("unexpected token", tok)

    def _iterate(self) -> Expr:
        name = self.expect_name()
        self.expect("^^")
        count = self.expr()
        self.expect(")")
        return Iterate(name, count, self._argument())

    def _quantifier(self, kind: QuantKind) -> Cond:
        var = self.expect_name()
        bound = None
        if self.at("<"):
            self.advance()
            bound = self.expr(INFIX["<"][0])
        elif self.at("::"):
            self.advance()
            self.expect_name()
        if bound is None and kind is QuantKind.FORALL:
            self.error(f"universal quantifier over {var} needs a bound")
        self.expect(".")
        return Quant(kind, var, bound, self.cond())

    def _name(self, tok: Token) -> Node:
        name = tok.text
        if name in ("true", "false"):
            return BoolConst(name == "true")
        if name in KEYWORDS:
            self.error("unexpected keyword", tok)
        if name in UNARY_BUILTINS:
            return Unary(UNARY_BUILTINS[name], self._argument())
        if name == "log":
            base = self.advance()
            if base.text != "2":
                self.error("only base-2 logarithms are supported", base)
            return Unary(UnaryOp.LOG2, self._argument())
        if name in BINARY_BUILTINS:
            self.expect("(")
            first = self.expr()
            self.expect(",")
            second = self.expr()
            self.expect(")")
            return Binary(BINARY_BUILTINS[name], first, second)
        if name in ("card", "CARD"):
            if self.at("("):
                self.advance()
                target = self.expect_name()
                self.expect(")")
            else:
                target = self.expect_name()
            return Card(target)
        if name in self.functions:
            return Apply(name, self._argument())
        if name in self.vectors:
            if self.at("["):
                self.advance()
                index = self.expr()
                self.expect("]")
                return Index(name, index)
            if self.at("(") or self.starts_primary():
                return Index(name, self._argument())
            return Var(name)
        if self.at("["):
            self.advance()
            index = self.expr()
            self.expect("]")
            return Index(name, index)
        if self.at("("):
            return Apply(name, self._argument())
        return Var(name)

    # -- statements -----------------------------------------------------

    STOPPERS = ("od", "fi", "else", '"')

    def stmts(self) -> Stmt:
        items = []
        while True:
            if self.at_end() or any(self.at(s) for s in self.STOPPERS):
                break
            items.append(self.stmt())
            if not self.at(";"):
                break
            self.advance()
        if not items:
            return Skip()
        return items[0] if len(items) == 1 else Seq(tuple(items))

    def stmt(self) -> Stmt:
        if self.at("skip"):
            self.advance()
            return Skip()
        if self.at("if"):
            self.advance()
            cond = self.cond()
            self.expect("then")
            then = self.stmts()
            orelse = Skip()
            if self.at("else"):
                self.advance()
                orelse = self.stmts()
            self.expect("fi")
            return If(cond, then, orelse)
        if self.at("while"):
            return self._while()
        name = self.expect_name()
        if self.at("["):
            self.advance()
            index = self.expr()
            self.expect("]")
            self.expect(":=")
            self.vectors.add(name)
            return VecAssign(name, index, self.expr())
        if not self.at(":="):
            self.error("expected ':=' in assignment", self.peek())
        self.advance()
        value = self.expr()
        if isinstance(value, Var) and value.name in self.vectors:
            self.vectors.add(name)
        return Assign(name, value)

    def _while(self) -> While:
        start = self.advance()
        guard = self.cond()
        invariant = variant = None
        if self.at("invariant"):
            self.advance()
            invariant = self.cond()
        if self.at("variant"):
            self.advance()
            variant = self.expr()
        if invariant is None:
            raise ParseError("while loop is missing its invariant", start.line, start.column)
        if variant is None:
            raise ParseError("while loop is missing its variant", start.line, start.column)
        self.expect("do")
        body = self.stmts()
        self.expect("od")
        return While(guard, invariant, variant, body)

    # -- programs -------------------------------------------------------

    def _sort(self, name: str) -> Param:
        tok = self.peek()
        sort_name = self.expect_name()
        match sort_name:
            case "real":
                if self.at("⇒"):
                    self.advance()
                    if self.expect_name() != "real":
                        self.error("functions must map real to real", tok)
                    return Param(name, Sort.FUN)
                if self.at("vec"):
                    self.advance()
                    return Param(name, Sort.VEC, self._length())
                return Param(name, Sort.REAL)
            case "nat":
                return Param(name, Sort.NAT)
            case "fun":
                return Param(name, Sort.FUN)
            case "vec":
                return Param(name, Sort.VEC, self._length())
        raise ParseError(f"unknown sort {sort_name!r}", tok.line, tok.column)

    def _length(self) -> int:
        self.expect("[")
        tok = self.advance()
        if tok.kind != "num" or not tok.text.isdigit():
            self.error("vector length must be a literal integer", tok)
        self.expect("]")
        return int(tok.text)

    def program(self) -> Program:
        self.expect("program")
        name = self.expect_name()
        quoted = self.at('"')
        if quoted:
            self.advance()
        self.expect("(")
        params = []
        while not self.at(")"):
            tok = self.peek()
            pname = self.expect_name()
            if any(p.name == pname for p in params):
                raise ParseError(f"duplicate parameter {pname}", tok.line, tok.column)
            self.expect("::")
            params.append(self._sort(pname))
            if not self.at(","):
                break
            self.advance()
        self.expect(")")
        if quoted:
            self.expect('"')
        if self.at("over"):
            self.advance()
            self.expect_name()
        self.expect("=")
        self.expect('"')

        for p in params:
            if p.sort is Sort.FUN:
                self.functions.add(p.name)
            elif p.sort is Sort.VEC:
                self.vectors.add(p.name)

        body = self.stmts()
        self.expect('"')
        if not self.at_end():
            self.error("unexpected text after program body")
        return Program(name, tuple(params), body)


def parse_program(text: str) -> Program:
    """Parse a `program NAME (params) = "body"` declaration."""
    return Parser(text).program()


def parse_expr(text: str, functions: Iterable[str] = (), vectors: Iterable[str] = ()) -> Expr:
    parser = Parser(text, functions, vectors)
    e = parser.expr()
    if not parser.at_end():
        parser.error("unexpected text after expression")
    return e


def parse_cond(text: str, functions: Iterable[str] = (), vectors: Iterable[str] = ()) -> Cond:
    parser = Parser(text, functions, vectors)
    c = parser.cond()
    if not parser.at_end():
        parser.error("unexpected text after condition")
    return c
