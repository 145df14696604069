"""
Runtime checking of Hoare triples and loop annotations.

Handles:
- Auditing a recorded trace against every loop's invariant and variant
  (a pure function of the trace, so a replayed trace gives the same verdict)
- Running a triple on each sample of a plan and judging the outcome
- Aggregating per-sample verdicts into a CheckReport keyed by sample index
- Searching a plan for the first counterexample (falsify)

Verdict priority within one sample: annotation faults first, then
nontermination or a runtime fault, then the postcondition.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Optional

from ..config import get_settings
from ..errors import EvalError
from ..interp import (
    EventKind, Trace, Terminated, BudgetExhausted, RuntimeFault, bind_args, run,
)
from ..lang.ast import FunctionDef, Program
from ..lang.evaluate import eval_cond, eval_expr
from ..lang.printer import show
from ..lang.values import Value, Nat, Real, is_integral, to_python
from .sampling import SamplePlan
from .triple import HoareTriple, evaluate_witness

logger = logging.getLogger(__name__)


class VerdictKind(Enum):
    PASS = "pass"
    POST_VIOLATION = "post-violation"
    INVARIANT_VIOLATION = "invariant-violation"
    VARIANT_VIOLATION = "variant-violation"
    NONTERMINATION = "nontermination"
    RUNTIME_ERROR = "runtime-error"


class VariantFault(Enum):
    NEGATIVE = "negative"
    NON_DECREASING = "non-decreasing"
    NON_INTEGER = "non-integer"


@dataclass
class Verdict:
    index: int
    kind: VerdictKind
    args: dict = field(default_factory=dict)
    loop: Optional[int] = None
    iteration: Optional[int] = None
    state: Optional[dict[str, Value]] = None
    message: str = ""
    variant_fault: Optional[VariantFault] = None
    trace: Trace = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.kind is VerdictKind.PASS

    def to_record(self) -> dict:
        record = {"sample": self.index, "verdict": self.kind.value, "args": _plain(self.args)}
        if self.loop is not None:
            record["loop"] = self.loop
            record["iteration"] = self.iteration
        if self.variant_fault is not None:
            record["variant_fault"] = self.variant_fault.value
        if self.state is not None:
            record["state"] = {k: to_python(v) for k, v in self.state.items()}
        if self.message:
            record["message"] = self.message
        return record


def _plain(args: Mapping) -> dict:
    plain = {}
    for name, raw in args.items():
        if isinstance(raw, FunctionDef):
            plain[name] = raw.source or show(raw.body)
        elif isinstance(raw, (Real, Nat)):
            plain[name] = raw.value
        elif isinstance(raw, tuple):
            plain[name] = list(raw)
        else:
            plain[name] = raw
    return plain


@dataclass
class CheckReport:
    name: str
    verdicts: dict[int, Verdict] = field(default_factory=dict)
    rejected: list[int] = field(default_factory=list)
    seed: Optional[int] = None
    budget: int = 0
    planned: int = 0

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    @property
    def empty_evidence(self) -> bool:
        return not self.verdicts

    @property
    def counterexamples(self) -> list[Verdict]:
        return [self.verdicts[i] for i in sorted(self.verdicts) if not self.verdicts[i].passed]

    @property
    def coverage(self) -> str:
        """Sampled evidence only; never a claim about all inputs."""
        return (f"{len(self.verdicts)} of {self.planned} samples checked, "
                f"{len(self.rejected)} rejected by the precondition")

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "empty_evidence": self.empty_evidence,
            "seed": self.seed,
            "budget": self.budget,
            "coverage": self.coverage,
            "checked": len(self.verdicts),
            "rejected": len(self.rejected),
            "counterexamples": [v.to_record() for v in self.counterexamples],
        }


# =============================================================================
# Trace audit
# =============================================================================

def _check_variant(value: Value, previous: Optional[Value]) -> Optional[VariantFault]:
    if not is_integral(value):
        return VariantFault.NON_INTEGER
    if value.value < 0:
        return VariantFault.NEGATIVE
    if previous is not None and not value.value < previous.value:
        return VariantFault.NON_DECREASING
    return None


def audit_trace(
    program: Program,
    trace: Trace,
    funcs: Optional[Mapping[str, FunctionDef]] = None,
    constants: Optional[Mapping[str, Value]] = None,
) -> Optional[Verdict]:
    """
    First annotation fault in a trace, or None.

    The invariant must hold at every loop head, the post-exit head included.
    The variant must be a nonnegative integer at every head and strictly
    smaller than at the previous head of the same loop entry; a failed
    descent is attributed to the body execution between the two heads.
    """
    funcs = funcs or {}
    constants = constants or {}
    loops = program.loops()
    previous: dict[tuple[int, int], Value] = {}

    for event in trace:
        if event.kind is not EventKind.LOOP_HEAD:
            continue
        loop = loops[event.loop]
        env = {**event.vars, **constants}
        try:
            holds = eval_cond(loop.invariant, env, funcs)
            reason = "invariant is false"
        except EvalError as err:
            holds, reason = False, f"invariant could not be evaluated: {err}"
        if not holds:
            return Verdict(index=0, kind=VerdictKind.INVARIANT_VIOLATION, loop=event.loop,
                           iteration=event.iteration, state=dict(event.vars), message=reason)

        key = (event.loop, event.entry)
        try:
            value = eval_expr(loop.variant, env, funcs)
        except EvalError as err:
            return Verdict(index=0, kind=VerdictKind.VARIANT_VIOLATION, loop=event.loop,
                           iteration=event.iteration, state=dict(event.vars),
                           message=f"variant could not be evaluated: {err}",
                           variant_fault=VariantFault.NON_INTEGER)
        fault = _check_variant(value, previous.get(key))
        if fault is not None:
            iteration = event.iteration - 1 if fault is VariantFault.NON_DECREASING else event.iteration
            return Verdict(index=0, kind=VerdictKind.VARIANT_VIOLATION, loop=event.loop,
                           iteration=iteration, state=dict(event.vars),
                           message=f"variant {show(loop.variant)} = {to_python(value)!r}",
                           variant_fault=fault)
        previous[key] = value
    return None


def variant_series(program: Program, trace: Trace, funcs=None, loop: int = 0) -> list:
    """Variant value at each head of one loop, in trace order."""
    variant = program.loops()[loop].variant
    return [to_python(eval_expr(variant, e.vars, funcs or {})) for e in trace
            if e.kind is EventKind.LOOP_HEAD and e.loop == loop]


# =============================================================================
# Checking one sample
# =============================================================================

def _outcome_verdict(program: Program, outcome, funcs, constants) -> Optional[Verdict]:
    """Annotation audit, then nontermination or runtime fault."""
    fault = audit_trace(program, outcome.trace, funcs, constants)
    if fault is not None:
        return fault
    if isinstance(outcome, BudgetExhausted):
        return Verdict(index=0, kind=VerdictKind.NONTERMINATION,
                       message=f"step budget of {outcome.budget} exhausted")
    if isinstance(outcome, RuntimeFault):
        return Verdict(index=0, kind=VerdictKind.RUNTIME_ERROR, message=outcome.message)
    return None


def _check_post(t: HoareTriple, outcome: Terminated, constants) -> Optional[Verdict]:
    env = {**outcome.state.vars, **constants}
    funcs = outcome.state.funcs
    witnesses = {}
    for name, witness in t.witnesses.items():
        try:
            witnesses[name] = evaluate_witness(witness, env, funcs)
        except EvalError as err:
            return Verdict(index=0, kind=VerdictKind.POST_VIOLATION, state=dict(outcome.state.vars),
                           message=f"witness {name}: {err}")
    try:
        holds = eval_cond(t.post, env, funcs, witnesses)
        reason = "postcondition is false"
    except EvalError as err:
        holds, reason = False, f"postcondition could not be evaluated: {err}"
    if holds:
        return None
    if witnesses:
        reason += " with " + ", ".join(f"{k} = {to_python(v)!r}" for k, v in witnesses.items())
    return Verdict(index=0, kind=VerdictKind.POST_VIOLATION, state=dict(outcome.state.vars), message=reason)


def check_sample(t: HoareTriple, index: int, args: dict, budget: int) -> Optional[Verdict]:
    """Verdict for one argument map, or None when the precondition rejects it."""
    constants = t.constant_env()
    initial = bind_args(t.program, args)
    try:
        if not eval_cond(t.pre, {**initial.vars, **constants}, initial.funcs):
            return None
    except EvalError as err:
        logger.debug(f"sample {index}: precondition not evaluable ({err}); rejected")
        return None

    outcome = run(t.program, args, budget)
    funcs = initial.funcs
    verdict = _outcome_verdict(t.program, outcome, funcs, constants)
    if verdict is None:
        verdict = _check_post(t, outcome, constants)
    if verdict is None:
        verdict = Verdict(index=index, kind=VerdictKind.PASS, args=dict(args))
    else:
        verdict = replace(verdict, index=index, args=dict(args), trace=outcome.trace)
    logger.debug(f"sample {index} of {t.name}: {verdict.kind.value}")
    return verdict


# =============================================================================
# Public operations
# =============================================================================

def _default_plan(t: HoareTriple) -> SamplePlan:
    if t.program.params:
        raise ValueError(f"{t.name} has parameters; a sample plan is required")
    return SamplePlan(instances=[{}])


def check_triple(
    t: HoareTriple,
    plan: Optional[SamplePlan] = None,
    budget: Optional[int] = None,
    workers: Optional[int] = None,
) -> CheckReport:
    """Run the triple on every sample; samples may be checked concurrently."""
    settings = get_settings()
    t.validate()
    plan = plan if plan is not None else _default_plan(t)
    budget = budget if budget is not None else settings.budget
    workers = workers if workers is not None else settings.workers
    samples = list(enumerate(plan.samples()))
    logger.info(f"Checking {t.name} on {len(samples)} samples (seed={plan.seed}, budget={budget})")

    def check(item):
        index, args = item
        return index, check_sample(t, index, args, budget)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(check, samples))
    else:
        results = [check(item) for item in samples]

    report = CheckReport(name=t.name, seed=plan.seed, budget=budget, planned=len(samples))
    for index, verdict in results:
        if verdict is None:
            report.rejected.append(index)
        else:
            report.verdicts[index] = verdict
    report.rejected.sort()

    if report.empty_evidence:
        logger.warning(f"{t.name}: every sample was rejected by the precondition; no evidence")
    else:
        logger.info(f"{t.name}: {'pass' if report.passed else 'FAIL'} ({report.coverage})")
    return report


def check_annotations(p: Program, args, budget: Optional[int] = None) -> CheckReport:
    """Audit every loop's invariant and variant on one run."""
    budget = budget if budget is not None else get_settings().budget
    initial = bind_args(p, args)
    outcome = run(p, args, budget)
    verdict = _outcome_verdict(p, outcome, initial.funcs, {})
    plain_args = dict(args) if isinstance(args, Mapping) else dict(zip(p.param_names, args))
    if verdict is None:
        verdict = Verdict(index=0, kind=VerdictKind.PASS, args=plain_args, trace=outcome.trace)
    else:
        verdict = replace(verdict, args=plain_args, trace=outcome.trace)
    return CheckReport(name=p.name, verdicts={0: verdict}, budget=budget, planned=1)


def falsify(t: HoareTriple, plan: Optional[SamplePlan] = None, budget: Optional[int] = None) -> Optional[Verdict]:
    """First failing sample, with its full trace, or None."""
    t.validate()
    plan = plan if plan is not None else _default_plan(t)
    budget = budget if budget is not None else get_settings().budget
    checked = 0
    for index, args in enumerate(plan.samples()):
        verdict = check_sample(t, index, args, budget)
        if verdict is None:
            continue
        checked += 1
        if not verdict.passed:
            logger.info(f"{t.name}: counterexample at sample {index} ({verdict.kind.value})")
            return verdict
    if checked == 0:
        logger.warning(f"{t.name}: every sample was rejected by the precondition; no evidence")
    return None
