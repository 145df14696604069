"""
Tests for the step-budgeted interpreter and its traces.
"""

import pytest
from hypothesis import given, settings, strategies as st

from certinum.errors import ArgumentError
from certinum.interp import (
    EventKind, Terminated, BudgetExhausted, RuntimeFault,
    bind_args, run, run_bounded_deterministic, loop_heads, replay_trace,
    trace_to_jsonl, trace_from_jsonl,
)
from certinum.lang import Real, Nat, Vec, parse_program
from certinum.methods import bisection_program, fixed_point_program, vec_scale_program

SQRT2_ARGS = {"f": "x^2 - 2", "a": 1.0, "b": 1.5, "tol": 1e-4}


def test_bisection_sqrt2():
    outcome = run(bisection_program(), SQRT2_ARGS)
    assert isinstance(outcome, Terminated)
    final = outcome.state.vars
    assert final["iter"] == Nat(13)
    assert (final["lower"].value + final["upper"].value) / 2 == pytest.approx(1.41421508789, abs=1e-11)
    assert final["xmid"].value == final["upper"].value == 1.41424560546875
    assert final["upper"].value - final["lower"].value <= 1e-4
    assert outcome.trace[-1].kind is EventKind.TERMINATION


def test_fixed_point_sqrt3():
    outcome = run(fixed_point_program(), {"f": "(3/x + x)/2", "x0": 1.0, "tol": 1e-3, "max_iter": 10})
    assert isinstance(outcome, Terminated)
    final = outcome.state.vars
    assert final["x"].value == pytest.approx(1.73205081001, abs=1e-10)
    assert final["itr"] == Nat(4)
    assert final["Break"].value == 1


def test_fixed_point_with_zero_iterations():
    outcome = run(fixed_point_program(), {"f": "(3/x + x)/2", "x0": 1.6, "tol": 1e-3, "max_iter": 0})
    assert isinstance(outcome, Terminated)
    assert outcome.state.vars["x"] == Real(1.6)
    assert outcome.state.vars["itr"] == Nat(0)


def test_vec_scale():
    outcome = run(vec_scale_program(), {"n": 3.0, "X": [1.0, 2.0, 3.0, 4.0]})
    assert isinstance(outcome, Terminated)
    assert outcome.state.vars["vc"] == Vec((3.0, 6.0, 9.0, 12.0))
    assert outcome.state.vars["i"] == Nat(4)
    # arguments are never modified
    assert outcome.state.vars["X"] == Vec((1.0, 2.0, 3.0, 4.0))


def test_loop_heads_include_the_exit_test():
    outcome = run(vec_scale_program(), {"n": 1.0, "X": [0.0, 0.0, 0.0, 0.0]})
    heads = loop_heads(outcome.trace)
    assert [h.iteration for h in heads] == [0, 1, 2, 3, 4]
    assert [h.taken for h in heads] == [True, True, True, True, False]
    assert all(h.loop == 0 and h.entry == 0 for h in heads)


def test_nested_loop_entries_are_counted():
    source = '''program nest (n :: nat) = "
        i := 0; total := 0;
        while i < n invariant i ≤ n variant n - i do
          j := 0;
          while j < i invariant j ≤ i variant i - j do
            total := total + 1; j := j + 1
          od;
          i := i + 1
        od"'''
    outcome = run(parse_program(source), {"n": 3})
    assert isinstance(outcome, Terminated)
    assert outcome.state.vars["total"] == Nat(3)
    inner = loop_heads(outcome.trace, loop=1)
    assert sorted({h.entry for h in inner}) == [0, 1, 2]
    assert max(h.iteration for h in inner if h.entry == 2) == 2


def test_budget_exhaustion():
    source = 'program spin (n :: nat) = "i := 0; while true invariant true variant n do i := i + 1 od"'
    outcome = run(parse_program(source), {"n": 1}, budget=50)
    assert isinstance(outcome, BudgetExhausted)
    assert outcome.steps == 50
    assert outcome.budget == 50
    assert outcome.trace


def test_budget_counts_every_step():
    program = parse_program('program p (x :: real) = "y := x; z := y; skip"')
    assert isinstance(run(program, {"x": 1.0}, budget=3), Terminated)
    assert isinstance(run(program, {"x": 1.0}, budget=2), BudgetExhausted)


def test_runtime_fault():
    program = parse_program('program p (x :: real) = "y := 1; z := y / x"')
    outcome = run(program, {"x": 0.0})
    assert isinstance(outcome, RuntimeFault)
    assert "division by zero" in outcome.message
    assert [e.name for e in outcome.trace] == ["y"]


def test_vector_used_as_its_own_index_is_a_fault():
    program = parse_program('program p (X :: real vec[2]) = "X[X] := 1"')
    outcome = run(program, {"X": [0.0, 1.0]})
    assert isinstance(outcome, RuntimeFault)
    assert "got a vector" in outcome.message
    assert outcome.trace == []


def test_fault_inside_function_argument():
    outcome = run(bisection_program(), {"f": "ln(x)", "a": -1.0, "b": 2.0, "tol": 0.5})
    assert isinstance(outcome, RuntimeFault)


def test_invalid_budget():
    with pytest.raises(ValueError):
        run(vec_scale_program(), {"n": 1.0, "X": [1, 2, 3, 4]}, budget=0)


@pytest.mark.parametrize("args", [
    {"n": 1.0},
    {"n": 1.0, "X": [1.0, 2.0], "extra": 1},
    {"n": 1.0, "X": [1.0, 2.0, 3.0]},
    {"n": [1.0], "X": [1.0, 2.0, 3.0, 4.0]},
])
def test_argument_errors(args):
    with pytest.raises(ArgumentError):
        bind_args(vec_scale_program(), args)


def test_nat_parameter_rejects_fractions():
    with pytest.raises(ArgumentError):
        bind_args(fixed_point_program(), {"f": "x", "x0": 1.0, "tol": 0.1, "max_iter": 2.5})


def test_positional_arguments():
    state = bind_args(vec_scale_program(), [2.0, (1.0, 2.0, 3.0, 4.0)])
    assert state.vars["n"] == Real(2.0)
    assert state.vars["X"] == Vec((1.0, 2.0, 3.0, 4.0))


def test_on_event_sees_the_whole_trace():
    seen = []
    outcome = run(vec_scale_program(), {"n": 2.0, "X": [1, 2, 3, 4]}, on_event=seen.append)
    assert seen == outcome.trace


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(min_value=0.0, max_value=1.4),
    b=st.floats(min_value=1.5, max_value=3.0),
    tol=st.floats(min_value=1e-9, max_value=1e-2),
)
def test_runs_are_deterministic(a, b, tol):
    args = {"f": "x^2 - 2", "a": a, "b": b, "tol": tol}
    first = run_bounded_deterministic(bisection_program(), args)
    second = run_bounded_deterministic(bisection_program(), args)
    assert trace_to_jsonl(first.trace) == trace_to_jsonl(second.trace)


def test_replay_rebuilds_the_final_state():
    outcome = run(bisection_program(), SQRT2_ARGS)
    assert replay_trace(bisection_program(), SQRT2_ARGS, outcome.trace) == outcome.state.vars


def test_jsonl_roundtrip():
    outcome = run(vec_scale_program(), {"n": 0.5, "X": [1.0, -2.0, 3.0, 4.5]})
    text = trace_to_jsonl(outcome.trace)
    assert len(text.splitlines()) == len(outcome.trace)
    assert trace_from_jsonl(text) == outcome.trace


def test_assignment_events_carry_values():
    outcome = run(bisection_program(), SQRT2_ARGS)
    iters = [e.value for e in outcome.trace if e.kind is EventKind.ASSIGNMENT and e.name == "iter"]
    assert iters == [Nat(k) for k in range(14)]
    first_mid = next(e for e in outcome.trace if e.name == "xmid" and e.vars.get("iter") == Nat(1))
    assert first_mid.value == Real(1.25)
