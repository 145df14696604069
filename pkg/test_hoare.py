"""
Tests for triples, sample plans, trace audits and spec files.
"""

import math

import numpy as np
import pytest

from certinum.config import DATA_PATH
from certinum.errors import ParseError, UncheckableTripleError
from certinum.hoare import (
    Explicit, Grid, Uniform, SamplePlan, VerdictKind, VariantFault, OracleCall,
    make_triple, check_triple, check_annotations, falsify, audit_trace, variant_series,
    bracket_root, fixed_point_root, load_spec, parse_spec, parse_arguments,
)
from certinum.interp import run, trace_to_jsonl, trace_from_jsonl, bind_args
from certinum.lang import FunctionDef, Nat, parse_expr, parse_program
from certinum.methods import (
    bisection_program, bisection_triple, fixed_point_triple, vec_scale_program, vec_scale_triple,
)
from certinum.methods.programs import PROGRAMS_PATH

SPECS = DATA_PATH / "specs"
VEC_SCALE_SOURCE = (PROGRAMS_PATH / "vec_scale.gcl").read_text(encoding="utf-8")


def _vec_scale_variant(old, new):
    assert old in VEC_SCALE_SOURCE
    return parse_program(VEC_SCALE_SOURCE.replace(old, new))


def bisection_plan(count=64, seed=7):
    return SamplePlan(
        generators={
            "f": Explicit(("x^2 - 2",)),
            "a": Uniform(0.0, 1.4),
            "b": Uniform(1.5, 3.0),
            "tol": Uniform(1e-9, 1e-2),
        },
        count=count,
        seed=seed,
    )


# =============================================================================
# Sample plans
# =============================================================================

def test_generators():
    rng = np.random.default_rng(0)
    assert [Explicit((1, 2, 3)).draw(rng, k) for k in range(5)] == [1, 2, 3, 1, 2]
    assert [Grid(0.0, 1.0, 3).draw(rng, k) for k in range(4)] == [0.0, 0.5, 1.0, 0.0]
    vec = Uniform(-1.0, 1.0, length=4).draw(rng, 0)
    assert len(vec) == 4
    assert all(-1.0 <= v < 1.0 for v in vec)


def test_plans_are_reproducible_and_extend_by_appending():
    short = list(bisection_plan(count=10, seed=3).samples())
    again = list(bisection_plan(count=10, seed=3).samples())
    longer = list(bisection_plan(count=20, seed=3).samples())
    assert short == again
    assert longer[:10] == short
    assert list(bisection_plan(count=10, seed=4).samples()) != short


def test_instances_come_first():
    plan = SamplePlan(generators={"n": Uniform(0, 1)}, instances=[{"n": 5.0}], count=2, seed=1)
    samples = list(plan.samples())
    assert samples[0] == {"n": 5.0}
    assert plan.size == 3
    assert len(samples) == 3


def test_empty_plan():
    with pytest.raises(ValueError):
        list(SamplePlan().samples())
    with pytest.raises(ValueError):
        SamplePlan(generators={"n": Uniform(0, 1)}, count=-1)


# =============================================================================
# Triples
# =============================================================================

def test_bisection_triple_holds_on_samples():
    report = check_triple(bisection_triple(), bisection_plan())
    assert report.passed
    assert not report.empty_evidence
    assert len(report.verdicts) + len(report.rejected) == 64
    assert "of 64 samples checked" in report.coverage


def test_bisection_witness_is_an_oracle_call():
    t = bisection_triple()
    assert isinstance(t.witnesses["c"], OracleCall)
    assert t.witnesses["c"].oracle == "bracket_root"


def test_bisection_falsified_without_width_precondition():
    t = bisection_triple(pre="tol > 0 ∧ f(a) * f(b) < 0")
    plan = SamplePlan(instances=[
        {"f": "x^2 - 2", "a": 1.0, "b": 1.5, "tol": 1e-4},
        {"f": "x^2 - 2", "a": 1.0, "b": 1.5, "tol": 0.5},
    ])
    verdict = falsify(t, plan)
    assert verdict is not None
    assert verdict.index == 1
    assert verdict.kind is VerdictKind.POST_VIOLATION
    assert verdict.state["iter"] == Nat(0)
    assert verdict.trace


def test_fixed_point_triple():
    t = fixed_point_triple(math.sqrt(3), 0.2, 0.2)
    plan = SamplePlan(
        generators={
            "f": Explicit(("(3/x + x)/2",)),
            "x0": Uniform(1.55, 1.9),
            "tol": Uniform(1e-6, 1e-2),
            "max_iter": Explicit((0, 1, 5, 10)),
        },
        count=40,
        seed=11,
    )
    report = check_triple(t, plan)
    assert report.passed
    assert not report.rejected


def test_fixed_point_triple_fails_with_too_small_a_rate():
    t = fixed_point_triple(math.sqrt(3), 0.01, 0.2)
    plan = SamplePlan(instances=[{"f": "(3/x + x)/2", "x0": 1.9, "tol": 1e-12, "max_iter": 1}])
    verdict = falsify(t, plan)
    assert verdict.kind is VerdictKind.POST_VIOLATION


def test_vec_scale_triple():
    plan = SamplePlan(generators={"n": Uniform(-2, 2), "X": Uniform(-10, 10, length=4)}, count=16, seed=5)
    assert check_triple(vec_scale_triple(), plan).passed


def test_parallel_checking_gives_the_same_report():
    serial = check_triple(bisection_triple(), bisection_plan(count=24), workers=1)
    parallel = check_triple(bisection_triple(), bisection_plan(count=24), workers=4)
    assert serial.to_record() == parallel.to_record()


def test_triple_without_parameters():
    program = parse_program('program nothing () = "skip"')
    assert check_triple(make_triple(program)).passed
    report = check_triple(make_triple(program, ensures="false"))
    assert not report.passed
    assert report.counterexamples[0].kind is VerdictKind.POST_VIOLATION


def test_parameters_need_a_plan():
    with pytest.raises(ValueError):
        check_triple(vec_scale_triple())


def test_empty_evidence_is_reported():
    t = make_triple(vec_scale_program(), requires="n > 100", ensures="true")
    report = check_triple(t, SamplePlan(instances=[{"n": 1.0, "X": [1, 2, 3, 4]}]))
    assert report.empty_evidence
    assert report.passed
    assert report.rejected == [0]
    assert falsify(t, SamplePlan(instances=[{"n": 1.0, "X": [1, 2, 3, 4]}])) is None


def test_existential_without_witness_is_uncheckable():
    with pytest.raises(UncheckableTripleError) as info:
        make_triple(bisection_program(), ensures="∃ c. |c - xmid| ≤ tol")
    assert info.value.missing == ["c"]


def test_expression_witness():
    t = make_triple(bisection_program(), requires="tol > 0 ∧ tol < b - a ∧ f(a) * f(b) < 0",
                    ensures="∃ c. lower ≤ c ∧ c ≤ upper", witnesses={"c": "(lower + upper) / 2"})
    assert check_triple(t, bisection_plan(count=8)).passed


def test_runtime_error_verdict():
    program = parse_program('program inv (x :: real) = "y := 1 / x"')
    t = make_triple(program, ensures="y * x = 1")
    verdict = falsify(t, SamplePlan(instances=[{"x": 2.0}, {"x": 0.0}]))
    assert verdict.index == 1
    assert verdict.kind is VerdictKind.RUNTIME_ERROR
    assert "division by zero" in verdict.message


def test_nontermination_verdict():
    program = parse_program(
        'program spin (n :: nat) = "i := 0; while true invariant true variant 1000000 - i do i := i + 1 od"'
    )
    t = make_triple(program)
    verdict = falsify(t, SamplePlan(instances=[{"n": 1}]), budget=100)
    assert verdict.kind is VerdictKind.NONTERMINATION


def test_report_record():
    report = check_triple(bisection_triple(), bisection_plan(count=4))
    record = report.to_record()
    assert record["name"] == "bisection"
    assert record["passed"] is True
    assert record["seed"] == 7
    assert record["checked"] + record["rejected"] == 4


# =============================================================================
# Annotation audits
# =============================================================================

def test_correct_annotations_pass():
    report = check_annotations(bisection_program(), {"f": "x^2 - 2", "a": 1.0, "b": 1.5, "tol": 1e-4})
    assert report.passed
    assert report.verdicts[0].trace


def test_bisection_variant_descends_to_zero():
    args = {"f": "x^2 - 2", "a": 1.0, "b": 1.5, "tol": 1e-4}
    outcome = run(bisection_program(), args)
    series = variant_series(bisection_program(), outcome.trace, bind_args(bisection_program(), args).funcs)
    assert series == list(range(13, -1, -1))


def test_wrong_invariant_is_caught_at_the_exit_head():
    program = _vec_scale_variant("invariant i ≤ CARD(X)", "invariant i < CARD(X)")
    report = check_annotations(program, {"n": 2.0, "X": [1.0, 2.0, 3.0, 4.0]})
    verdict = report.verdicts[0]
    assert verdict.kind is VerdictKind.INVARIANT_VIOLATION
    assert verdict.loop == 0
    assert verdict.iteration == 4
    assert verdict.state["i"] == Nat(4)


def test_constant_variant_is_not_decreasing():
    program = _vec_scale_variant("variant CARD(X) - i", "variant 0")
    verdict = check_annotations(program, {"n": 2.0, "X": [1.0, 2.0, 3.0, 4.0]}).verdicts[0]
    assert verdict.kind is VerdictKind.VARIANT_VIOLATION
    assert verdict.variant_fault is VariantFault.NON_DECREASING
    assert verdict.iteration == 0


def test_negative_variant():
    program = _vec_scale_variant("variant CARD(X) - i", "variant 2.0 - i")
    verdict = check_annotations(program, {"n": 2.0, "X": [1.0, 2.0, 3.0, 4.0]}).verdicts[0]
    assert verdict.variant_fault is VariantFault.NEGATIVE
    assert verdict.iteration == 3


def test_fractional_variant():
    program = _vec_scale_variant("variant CARD(X) - i", "variant (4 - i) / 2")
    verdict = check_annotations(program, {"n": 2.0, "X": [1.0, 2.0, 3.0, 4.0]}).verdicts[0]
    assert verdict.variant_fault is VariantFault.NON_INTEGER
    assert verdict.iteration == 1


def test_annotation_fault_outranks_nontermination():
    program = parse_program('program spin (n :: nat) = "i := 0; while true invariant true variant n do i := i + 1 od"')
    verdict = check_annotations(program, {"n": 3}, budget=100).verdicts[0]
    assert verdict.kind is VerdictKind.VARIANT_VIOLATION
    assert verdict.variant_fault is VariantFault.NON_DECREASING
    assert verdict.iteration == 0


def test_audit_is_a_function_of_the_trace():
    program = _vec_scale_variant("invariant i ≤ CARD(X)", "invariant i < CARD(X)")
    outcome = run(program, {"n": 2.0, "X": [1.0, 2.0, 3.0, 4.0]})
    direct = audit_trace(program, outcome.trace)
    replayed = audit_trace(program, trace_from_jsonl(trace_to_jsonl(outcome.trace)))
    assert direct == replayed
    assert direct.kind is VerdictKind.INVARIANT_VIOLATION


# =============================================================================
# Oracles
# =============================================================================

def test_bracket_root():
    f = FunctionDef("x", parse_expr("x^2 - 2"))
    assert bracket_root(f, 1.0, 2.0) == math.sqrt(2)
    assert bracket_root(f, 2.0 ** 0.5 - 1e-9, 2.0) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_fixed_point_root():
    g = FunctionDef("x", parse_expr("(3/x + x)/2"))
    assert fixed_point_root(g, 1.0) == pytest.approx(math.sqrt(3), rel=1e-15)


# =============================================================================
# Spec files
# =============================================================================

@pytest.mark.parametrize("name", ["bisection", "fixed_point", "vec_scale"])
def test_shipped_spec_files_pass(name):
    spec = load_spec(SPECS / f"{name}.spec")
    report = check_triple(spec.triple, spec.plan)
    assert report.passed, [v.to_record() for v in report.counterexamples]
    assert not report.empty_evidence
    assert spec.plan.seed == 0xC0FFEE


def test_spec_file_contents():
    spec = load_spec(SPECS / "fixed_point.spec")
    assert spec.triple.constants["r"] == math.sqrt(3)
    assert spec.plan.count == 64
    assert spec.plan.instances[0]["max_iter"] == 10
    assert spec.plan.generators["max_iter"] == Explicit((0.0, 1.0, 5.0, 10.0))


def test_inline_program_spec():
    text = """
-- doubling
program twice "(x :: real)" = "y := 2 * x"
ensures: y = x + x
sample x in grid(-1, 1, 5)
samples: 5
"""
    spec = parse_spec(text)
    report = check_triple(spec.triple, spec.plan)
    assert report.passed
    assert len(report.verdicts) == 5


def test_spec_requires_generators_for_every_parameter():
    text = """
program: ../programs/vec_scale.gcl
sample n in uniform(0, 1)
"""
    with pytest.raises(ParseError):
        parse_spec(text, base=SPECS)


@pytest.mark.parametrize("text", [
    "requires: true",
    "nonsense",
    'program p (x :: real) = "skip"\nsample y in uniform(0, 1)',
    'program p (x :: real) = "skip"\nseed: lots',
    'program p (x :: real) = "skip"\nsample x in normal(0, 1)',
])
def test_bad_spec_files(text):
    with pytest.raises(ParseError):
        parse_spec(text)


def test_parse_arguments():
    args = parse_arguments("n=2, X=[1, 2, 3, sqrt(16)]", vec_scale_program())
    assert args == {"n": 2.0, "X": (1.0, 2.0, 3.0, 4.0)}
    args = parse_arguments("f=x^2 - 2, a=1, b=1.5, tol=1e-4", bisection_program())
    assert args["f"] == "x^2 - 2"
    with pytest.raises(ParseError):
        parse_arguments("m=1", vec_scale_program())
