"""
Total-correctness Hoare triples H[pre] program [post].

Real existentials in the postcondition (`∃ c. ...`) are not executable; each
one needs a registered witness, either an expression over the final state or
a call to a named oracle (see oracles.ORACLES).
"""

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from ..errors import EvalError, UncheckableTripleError
from ..lang.ast import Cond, Expr, Var, Program, Sort, FunctionDef, TRUE, unbounded_existentials
from ..lang.checks import infer_sorts
from ..lang.evaluate import eval_expr, eval_real
from ..lang.parser import parse_cond, parse_expr
from ..lang.values import Value, Real
from .oracles import ORACLES

ORACLE_CALL_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\s*$", re.DOTALL)


@dataclass(frozen=True)
class OracleCall:
    """Witness computed by a registered oracle; a Var naming a function passes the function."""
    oracle: str
    args: tuple[Expr, ...]


Witness = Union[Expr, OracleCall]


@dataclass
class HoareTriple:
    pre: Cond
    program: Program
    post: Cond
    witnesses: dict[str, Witness] = field(default_factory=dict)
    constants: dict[str, float] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.program.name

    def validate(self) -> None:
        """Reject triples whose existentials have no witness, or whose oracles are unknown."""
        missing = [v for v in unbounded_existentials(self.post) if v not in self.witnesses]
        missing += [f"{v} (unknown oracle {w.oracle})" for v, w in self.witnesses.items()
                    if isinstance(w, OracleCall) and w.oracle not in ORACLES]
        if missing:
            raise UncheckableTripleError(missing)

    def constant_env(self) -> dict[str, Value]:
        return {name: Real(value) for name, value in self.constants.items()}


def evaluate_witness(witness: Witness, env: Mapping[str, Value], funcs: Mapping[str, FunctionDef]) -> Value:
    """Value of one witness in the final state."""
    if isinstance(witness, Expr):
        return eval_expr(witness, env, funcs)
    args = []
    for arg in witness.args:
        if isinstance(arg, Var) and arg.name in funcs:
            args.append(funcs[arg.name])
        else:
            args.append(eval_real(arg, env, funcs))
    try:
        return Real(ORACLES[witness.oracle](*args))
    except TypeError as err:
        raise EvalError(f"oracle {witness.oracle}: {err}") from err


# =============================================================================
# Construction from text
# =============================================================================

def name_context(program: Program) -> tuple[set[str], set[str]]:
    """Function names and vector names (parameters and vector locals) of a program."""
    sorts = infer_sorts(program)
    functions = {name for name, sort in sorts.items() if sort is Sort.FUN}
    vectors = {name for name, sort in sorts.items() if sort is Sort.VEC}
    return functions, vectors


def split_arguments(text: str) -> list[str]:
    """Split on commas outside parentheses and brackets."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    tail = "".join(current).strip()
    if tail:
        parts.append(tail)
    return parts


def parse_witness(text: str, functions: set[str], vectors: set[str]) -> Witness:
    """`oracle(arg, ...)` for a registered oracle, otherwise an expression."""
    m = ORACLE_CALL_RE.match(text)
    if m and m.group(1) in ORACLES:
        args = tuple(Var(a) if a in functions else parse_expr(a, functions, vectors)
                     for a in split_arguments(m.group(2)))
        return OracleCall(m.group(1), args)
    return parse_expr(text, functions, vectors)


def make_triple(
    program: Program,
    requires: Optional[str] = None,
    ensures: Optional[str] = None,
    witnesses: Optional[Mapping[str, str]] = None,
    constants: Optional[Mapping[str, float]] = None,
) -> HoareTriple:
    """Build and validate a triple from condition and witness source text."""
    functions, vectors = name_context(program)
    pre = parse_cond(requires, functions, vectors) if requires else TRUE
    post = parse_cond(ensures, functions, vectors) if ensures else TRUE
    parsed = {name: parse_witness(text, functions, vectors) for name, text in (witnesses or {}).items()}
    triple = HoareTriple(pre=pre, program=program, post=post, witnesses=parsed,
                         constants=dict(constants or {}))
    triple.validate()
    return triple
