"""
Reader for .spec files: a triple plus its sample plan.

    -- comment
    program: ../programs/bisection.gcl        (or an inline `program ...` declaration)
    requires: tol > 0 ∧ f(a) * f(b) < 0
    ensures: ∃ c. |f(c)| ≤ 1e-12
      ∧ lower ≤ c ∧ c ≤ upper                 (indented lines continue a stanza)
    witness c := bracket_root(f, lower, upper)
    const r := 1.5
    sample f := x^2 - 2                        (repeat for several functions)
    sample a in uniform(0, 1.4)                (or grid(lo, hi, n), or [v, ...])
    instance f=x^2-2, a=1, b=1.5, tol=0.0001
    samples: 64
    seed: 0xC0FFEE

A stanza starts at column 0 with one of the keywords; anything else
continues the previous stanza. Several `requires` stanzas are conjoined.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..errors import EvalError, ParseError
from ..lang.ast import Program, Sort, function_def
from ..lang.evaluate import eval_real
from ..lang.parser import parse_expr, parse_program
from ..lang.values import Real
from .sampling import Explicit, Grid, SamplePlan, Uniform
from .triple import HoareTriple, make_triple, split_arguments

logger = logging.getLogger(__name__)

STANZA_RE = re.compile(r"^(program:|program\s|requires:|ensures:|witness\s|const\s|sample\s|instance\s|samples:|seed:)")
ASSIGN_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*:=\s*(.+)$", re.DOTALL)
RANGE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s+in\s+(.+)$", re.DOTALL)
CALL_RE = re.compile(r"^\s*(grid|uniform)\s*\((.*)\)\s*$", re.DOTALL)


@dataclass
class SpecFile:
    triple: HoareTriple
    plan: SamplePlan
    path: Optional[Path] = None


def _stanzas(text: str) -> list[tuple[int, str, str]]:
    """(line, keyword, body) per stanza, comment lines dropped."""
    stanzas: list[list] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or (stripped.startswith("--") and not stripped.startswith("-->")):
            continue
        m = STANZA_RE.match(line)
        if m:
            keyword = m.group(1).strip()
            if keyword != "program:":
                keyword = keyword.rstrip(":")
            stanzas.append([lineno, keyword, line[m.end():].strip()])
        elif stanzas:
            stanzas[-1][2] += "\n" + line
        else:
            raise ParseError(f"expected a stanza keyword, got {stripped!r}", line=lineno)
    return [tuple(s) for s in stanzas]


def _number(text: str, consts: dict, lineno: int) -> float:
    try:
        return eval_real(parse_expr(text.strip()), consts)
    except (ParseError, EvalError) as err:
        raise ParseError(f"bad number {text.strip()!r}: {err}", line=lineno) from err


def _value(text: str, consts: dict, lineno: int):
    """A number, or a bracketed list of numbers (a vector)."""
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        return tuple(_number(part, consts, lineno) for part in split_arguments(text[1:-1]))
    return _number(text, consts, lineno)


def parse_arguments(text: str, program: Program, consts: Optional[dict] = None, lineno: Optional[int] = None) -> dict:
    """`NAME=VALUE, ...` into an argument map; function parameters keep their source text."""
    consts = consts or {}
    args = {}
    for part in split_arguments(text):
        name, eq, raw = part.partition("=")
        if not eq:
            raise ParseError(f"expected NAME=VALUE, got {part!r}", line=lineno)
        p = program.param(name.strip())
        if p is None:
            raise ParseError(f"{name.strip()} is not a parameter of {program.name}", line=lineno)
        args[p.name] = raw.strip() if p.sort is Sort.FUN else _value(raw, consts, lineno)
    return args


def _load_program(body: str, keyword: str, base: Optional[Path], lineno: int) -> Program:
    if keyword == "program":
        # inline declaration: the stanza keyword is part of the program text
        return parse_program("program " + body)
    path = Path(body.strip())
    if not path.is_absolute() and base is not None:
        path = base / path
    if not path.exists():
        raise ParseError(f"program file not found: {path}", line=lineno)
    return parse_program(path.read_text(encoding="utf-8"))


def parse_spec(text: str, base: Optional[Path] = None) -> SpecFile:
    """Parse spec-file text; relative program paths resolve against `base`."""
    stanzas = _stanzas(text)
    programs = [s for s in stanzas if s[1] in ("program", "program:")]
    if len(programs) != 1:
        raise ParseError(f"a spec file needs exactly one program stanza, found {len(programs)}")
    lineno, keyword, body = programs[0]
    program = _load_program(body, keyword, base, lineno)

    requires: list[str] = []
    ensures: list[str] = []
    witnesses: dict[str, str] = {}
    consts: dict[str, Real] = {}
    generators: dict = {}
    function_samples: dict[str, list] = {}
    instances: list[dict] = []
    count: Optional[int] = None
    seed: Optional[int] = None

    def param(name: str, lineno: int):
        p = program.param(name)
        if p is None:
            raise ParseError(f"{name} is not a parameter of {program.name}", line=lineno)
        return p

    for lineno, keyword, body in stanzas:
        match keyword:
            case "program" | "program:":
                continue
            case "requires":
                requires.append(body.strip())
            case "ensures":
                ensures.append(body.strip())
            case "witness" | "const":
                m = ASSIGN_RE.match(body)
                if not m:
                    raise ParseError(f"expected `{keyword} NAME := ...`", line=lineno)
                if keyword == "witness":
                    witnesses[m.group(1)] = m.group(2).strip()
                else:
                    consts[m.group(1)] = Real(_number(m.group(2), consts, lineno))
            case "sample":
                if m := ASSIGN_RE.match(body):
                    p = param(m.group(1), lineno)
                    if p.sort is not Sort.FUN:
                        raise ParseError(f"`sample {p.name} := ...` is for function parameters", line=lineno)
                    source = m.group(2).strip()
                    function_samples.setdefault(p.name, []).append(function_def(parse_expr(source), source=source))
                elif m := RANGE_RE.match(body):
                    p = param(m.group(1), lineno)
                    generators[p.name] = _generator(m.group(2).strip(), p, consts, lineno)
                else:
                    raise ParseError("expected `sample NAME := EXPR` or `sample NAME in ...`", line=lineno)
            case "instance":
                instances.append(parse_arguments(body, program, consts, lineno))
            case "samples" | "seed":
                try:
                    value = int(body.strip(), 0)
                except ValueError as err:
                    raise ParseError(f"{keyword} needs an integer, got {body.strip()!r}", line=lineno) from err
                if keyword == "samples":
                    count = value
                else:
                    seed = value

    for name, fns in function_samples.items():
        generators[name] = Explicit(tuple(fns))
    if generators:
        unsampled = [p.name for p in program.params if p.name not in generators]
        if unsampled:
            raise ParseError(f"no sample generator for {unsampled}")

    triple = make_triple(
        program,
        requires=" ∧ ".join(f"({c})" for c in requires) if requires else None,
        ensures=" ∧ ".join(f"({c})" for c in ensures) if ensures else None,
        witnesses=witnesses,
        constants={k: v.value for k, v in consts.items()},
    )
    plan = SamplePlan(generators=generators, instances=instances, count=count, seed=seed)
    logger.info(f"Spec for {program.name}: {len(instances)} instances, "
                f"{plan.count} seeded samples, seed={plan.seed}")
    return SpecFile(triple=triple, plan=plan)


def _generator(text: str, p, consts: dict, lineno: int):
    if text.startswith("["):
        if not text.endswith("]"):
            raise ParseError(f"unterminated list {text!r}", line=lineno)
        return Explicit(tuple(_value(v, consts, lineno) for v in split_arguments(text[1:-1])))
    m = CALL_RE.match(text)
    if not m:
        raise ParseError(f"expected [..], grid(lo, hi, n) or uniform(lo, hi), got {text!r}", line=lineno)
    args = [_number(a, consts, lineno) for a in split_arguments(m.group(2))]
    if m.group(1) == "grid":
        if len(args) != 3:
            raise ParseError("grid takes (lo, hi, n)", line=lineno)
        return Grid(args[0], args[1], int(args[2]))
    if len(args) != 2:
        raise ParseError("uniform takes (lo, hi)", line=lineno)
    return Uniform(args[0], args[1], length=p.length if p.sort is Sort.VEC else None)


def load_spec(path: Path | str) -> SpecFile:
    path = Path(path)
    spec = parse_spec(path.read_text(encoding="utf-8"), base=path.parent)
    spec.path = path
    return spec
