"""
Step-budgeted interpreter for the program notation.

Handles:
- Binding arguments to parameters (values, vectors, function bindings)
- Executing statements with a step budget (one step per assignment, skip,
  if-condition and guard evaluation)
- Recording a trace: loop heads (including the head reached with a false
  guard), assignments, branches and termination
- Trace replay and JSON-lines (de)serialisation
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Optional, Sequence, Union

from .config import get_settings
from .errors import ArgumentError, EvalError
from .lang.ast import (
    Expr, Stmt, Skip, Assign, VecAssign, Seq, If, While, Program, Param, Sort,
    FunctionDef, function_def,
)
from .lang.evaluate import eval_expr, eval_cond
from .lang.values import Value, Real, Nat, Vec, is_integral, to_python, from_python

logger = logging.getLogger(__name__)


class EventKind(Enum):
    LOOP_HEAD = "loop-head"
    ASSIGNMENT = "assignment"
    BRANCH = "branch"
    TERMINATION = "termination"


@dataclass(frozen=True)
class TraceEvent:
    """One entry of an execution trace; `vars` is a full snapshot of the state."""
    kind: EventKind
    vars: dict[str, Value]
    loop: Optional[int] = None        # preorder index of the While
    entry: Optional[int] = None       # how many times the loop was entered before
    iteration: Optional[int] = None   # body executions completed in this entry
    name: Optional[str] = None        # assignment target
    value: Optional[Value] = None     # value assigned
    taken: Optional[bool] = None      # guard / branch outcome

    def to_record(self) -> dict:
        record = {
            "kind": self.kind.value,
            "loop": self.loop,
            "iter": self.iteration,
            "vars": {k: to_python(v) for k, v in self.vars.items()},
        }
        if self.entry is not None:
            record["entry"] = self.entry
        if self.name is not None:
            record["name"] = self.name
            record["value"] = to_python(self.value)
        if self.taken is not None:
            record["taken"] = self.taken
        return record

    @classmethod
    def from_record(cls, record: dict) -> "TraceEvent":
        value = record.get("value")
        return cls(
            kind=EventKind(record["kind"]),
            vars={k: from_python(v) for k, v in record["vars"].items()},
            loop=record.get("loop"),
            entry=record.get("entry"),
            iteration=record.get("iter"),
            name=record.get("name"),
            value=from_python(value) if value is not None else None,
            taken=record.get("taken"),
        )


Trace = list[TraceEvent]


@dataclass
class ProgState:
    """Variable valuation plus function bindings. Variables are never removed."""
    vars: dict[str, Value] = field(default_factory=dict)
    funcs: dict[str, FunctionDef] = field(default_factory=dict)

    def snapshot(self) -> dict[str, Value]:
        return dict(self.vars)


@dataclass
class Terminated:
    state: ProgState
    trace: Trace
    steps: int


@dataclass
class BudgetExhausted:
    trace: Trace
    steps: int
    budget: int


@dataclass
class RuntimeFault:
    """Evaluation error during the run (named to avoid the builtin RuntimeError)."""
    message: str
    trace: Trace
    steps: int


ExecOutcome = Union[Terminated, BudgetExhausted, RuntimeFault]

Argument = Union[Value, FunctionDef, Expr, str, float, int, Sequence[float]]


class _OutOfBudget(Exception):
    pass


# =============================================================================
# Argument binding
# =============================================================================

def _bind_one(param: Param, raw) -> Union[Value, FunctionDef]:
    match param.sort:
        case Sort.FUN:
            if isinstance(raw, FunctionDef):
                return raw
            if isinstance(raw, Expr):
                return function_def(raw)
            if isinstance(raw, str):
                from .lang.parser import parse_expr
                return function_def(parse_expr(raw), source=raw)
        case Sort.REAL:
            if isinstance(raw, (Real, Nat)):
                return Real(raw.value)
            if isinstance(raw, (int, float)) and not isinstance(raw, bool):
                return Real(float(raw))
        case Sort.NAT:
            if isinstance(raw, Nat):
                return raw
            if isinstance(raw, Real):
                raw = raw.value
            if isinstance(raw, (int, float)) and not isinstance(raw, bool) and float(raw).is_integer() and raw >= 0:
                return Nat(int(raw))
        case Sort.VEC:
            if not isinstance(raw, Vec) and isinstance(raw, (list, tuple)):
                raw = Vec(tuple(raw))
            if isinstance(raw, Vec):
                if len(raw) != param.length:
                    raise ArgumentError(f"{param.name} expects a vector of length {param.length}, got {len(raw)}")
                return raw
    raise ArgumentError(f"{param.name}::{param.sort.value} cannot take {raw!r}")


def bind_args(program: Program, args: Union[Sequence, Mapping[str, object]]) -> ProgState:
    """Initial state of a run: positional or by-name arguments matched to the parameters."""
    if isinstance(args, Mapping):
        missing = [p.name for p in program.params if p.name not in args]
        extra = sorted(set(args) - set(program.param_names))
        if missing or extra:
            raise ArgumentError(f"{program.name}: missing arguments {missing}, unexpected {extra}")
        ordered = [args[p.name] for p in program.params]
    else:
        ordered = list(args)
        if len(ordered) != len(program.params):
            raise ArgumentError(f"{program.name} takes {len(program.params)} arguments, got {len(ordered)}")

    state = ProgState()
    for param, raw in zip(program.params, ordered):
        bound = _bind_one(param, raw)
        if isinstance(bound, FunctionDef):
            state.funcs[param.name] = bound
        else:
            state.vars[param.name] = bound
    return state


# =============================================================================
# Interpreter
# =============================================================================

class Interpreter:
    """Executes one program against a step budget, recording a trace."""

    def __init__(self, program: Program, budget: int, on_event: Optional[Callable[[TraceEvent], None]] = None):
        if budget < 1:
            raise ValueError(f"budget must be at least 1, got {budget}")
        self.program = program
        self.budget = budget
        self.loop_ids = {id(loop): i for i, loop in enumerate(program.loops())}

        # Optional observer, called with every event as it is recorded
        self.on_event = on_event

        self.state = ProgState()
        self.trace: Trace = []
        self.steps = 0
        self._entries: dict[int, int] = {}

    def _tick(self):
        if self.steps >= self.budget:
            raise _OutOfBudget()
        self.steps += 1

    def _record(self, kind: EventKind, **fields):
        event = TraceEvent(kind=kind, vars=self.state.snapshot(), **fields)
        self.trace.append(event)
        if self.on_event:
            self.on_event(event)

    def _eval(self, e):
        return eval_expr(e, self.state.vars, self.state.funcs)

    def _test(self, c) -> bool:
        return eval_cond(c, self.state.vars, self.state.funcs)

    def execute(self, stmt: Stmt):
        match stmt:
            case Skip():
                self._tick()
            case Assign(name=name, expr=e):
                self._tick()
                value = self._eval(e)
                self.state.vars[name] = value
                self._record(EventKind.ASSIGNMENT, name=name, value=value)
            case VecAssign(name=name, index=index, expr=e):
                self._tick()
                vec = self.state.vars.get(name)
                if not isinstance(vec, Vec):
                    raise EvalError(f"{name} is not a vector")
                i = self._eval(index)
                if isinstance(i, Vec):
                    raise EvalError(f"index of {name} must be a number, got a vector")
                if not is_integral(i):
                    raise EvalError(f"index of {name} must be an integer, got {i.value!r}")
                element = self._eval(e)
                if isinstance(element, Vec):
                    raise EvalError(f"cannot store a vector in {name}[{int(i.value)}]")
                value = vec.set(int(i.value), element.value)
                self.state.vars[name] = value
                self._record(EventKind.ASSIGNMENT, name=name, value=value)
            case Seq(stmts=stmts):
                for s in stmts:
                    self.execute(s)
            case If(cond=c, then=then, orelse=orelse):
                self._tick()
                taken = self._test(c)
                self._record(EventKind.BRANCH, taken=taken)
                self.execute(then if taken else orelse)
            case While():
                self._loop(stmt)
            case _:
                raise EvalError(f"unknown statement {stmt!r}")

    def _loop(self, loop: While):
        loop_id = self.loop_ids[id(loop)]
        entry = self._entries.get(loop_id, 0)
        self._entries[loop_id] = entry + 1
        iteration = 0
        while True:
            self._tick()
            holds = self._test(loop.guard)
            self._record(EventKind.LOOP_HEAD, loop=loop_id, entry=entry, iteration=iteration, taken=holds)
            if not holds:
                return
            self.execute(loop.body)
            iteration += 1

    def run(self, args) -> ExecOutcome:
        self.state = bind_args(self.program, args)
        self.trace = []
        self.steps = 0
        self._entries = {}
        try:
            self.execute(self.program.body)
        except _OutOfBudget:
            logger.debug(f"{self.program.name}: budget of {self.budget} steps exhausted")
            return BudgetExhausted(trace=self.trace, steps=self.steps, budget=self.budget)
        except EvalError as e:
            logger.debug(f"{self.program.name}: runtime fault after {self.steps} steps: {e}")
            return RuntimeFault(message=str(e), trace=self.trace, steps=self.steps)
        self._record(EventKind.TERMINATION)
        logger.debug(f"{self.program.name}: terminated after {self.steps} steps")
        return Terminated(state=self.state, trace=self.trace, steps=self.steps)


def run(
    program: Program,
    args,
    budget: Optional[int] = None,
    on_event: Optional[Callable[[TraceEvent], None]] = None,
) -> ExecOutcome:
    """Run a program; budget defaults to the configured step budget."""
    budget = budget if budget is not None else get_settings().budget
    return Interpreter(program, budget, on_event).run(args)


def run_bounded_deterministic(program: Program, args, budget: Optional[int] = None) -> ExecOutcome:
    """Same as run. Nothing in the semantics is random, so repeated runs give identical traces."""
    return run(program, args, budget)


def loop_heads(trace: Trace, loop: Optional[int] = None) -> list[TraceEvent]:
    """Loop-head events, optionally for one loop."""
    return [e for e in trace if e.kind is EventKind.LOOP_HEAD and (loop is None or e.loop == loop)]


def replay_trace(program: Program, args, trace: Trace) -> dict[str, Value]:
    """Rebuild the final variables by replaying the assignment events onto the arguments."""
    state = bind_args(program, args)
    for event in trace:
        if event.kind is EventKind.ASSIGNMENT:
            state.vars[event.name] = event.value
    return state.vars


def trace_to_jsonl(trace: Trace) -> str:
    return "".join(json.dumps(event.to_record(), ensure_ascii=False) + "\n" for event in trace)


def trace_from_jsonl(text: str) -> Trace:
    return [TraceEvent.from_record(json.loads(line)) for line in text.splitlines() if line.strip()]
