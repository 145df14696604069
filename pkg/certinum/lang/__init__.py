"""
Guarded-command program notation.

Core modules:
- ast: expressions, conditions, statements, programs
- values: Real / Nat / Vec runtime values
- parser / printer: concrete syntax in both directions
- evaluate: denotation of expressions and conditions
- checks: static well-formedness diagnostics
"""

from .ast import (
    Sort, UnaryOp, BinOp, CmpOp, LogicOp, QuantKind,
    Expr, Const, NatConst, Var, Unary, Binary, PowNat, Apply, Index, Card, Iterate,
    Neg, Abs, Floor, Ceil, Log2, Exp, Ln, Sin, Cos, Sqrt, NatOf, Min, Max,
    Cond, BoolConst, Compare, Not, Logic, Quant, TRUE, FALSE, conjunction, conjuncts,
    Stmt, Skip, Assign, VecAssign, Seq, If, While, Param, FunctionDef, Program,
    free_vars, function_def, unbounded_existentials,
)
from .values import Value, Real, Nat, Vec, to_python, from_python
from .parser import parse_program, parse_expr, parse_cond
from .printer import show, show_stmt, show_program
from .evaluate import eval_expr, eval_cond, eval_real, as_function
from .checks import well_formed, infer_sorts, Diagnostic, DiagnosticKind

__all__ = [
    # Syntax
    "Sort", "UnaryOp", "BinOp", "CmpOp", "LogicOp", "QuantKind",
    "Expr", "Const", "NatConst", "Var", "Unary", "Binary", "PowNat", "Apply",
    "Index", "Card", "Iterate",
    "Neg", "Abs", "Floor", "Ceil", "Log2", "Exp", "Ln", "Sin", "Cos", "Sqrt",
    "NatOf", "Min", "Max",
    "Cond", "BoolConst", "Compare", "Not", "Logic", "Quant", "TRUE", "FALSE",
    "conjunction", "conjuncts",
    "Stmt", "Skip", "Assign", "VecAssign", "Seq", "If", "While",
    "Param", "FunctionDef", "Program",
    "free_vars", "function_def", "unbounded_existentials",
    # Values
    "Value", "Real", "Nat", "Vec", "to_python", "from_python",
    # Concrete syntax
    "parse_program", "parse_expr", "parse_cond", "show", "show_stmt", "show_program",
    # Semantics
    "eval_expr", "eval_cond", "eval_real", "as_function",
    "well_formed", "infer_sorts", "Diagnostic", "DiagnosticKind",
]
