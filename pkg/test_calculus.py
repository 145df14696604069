"""
Tests for jets, finite differences and the Taylor remainder tools.

Polynomials are the exact oracle: with small integer coefficients and dyadic
points every jet coefficient is representable, so derivatives must match
Polynomial.deriv bit for bit.
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from certinum.calculus import (
    Polynomial, demo_h, jet_eval, nth_derivative, is_differentiable, extended,
    nth_derivative_fd, taylor_poly, lagrange_witness, peano_remainder,
    peano_limit_probe, taylor_limit_probe, decays, leibniz_product_check,
)
from certinum.errors import MethodPreconditionError, NonSmoothError, PreconditionKind
from certinum.lang import FunctionDef, Real, parse_expr, eval_real, show

FINE_RADII = [2.0 ** -k for k in range(1, 41)]

integer_polys = st.lists(st.integers(min_value=-10, max_value=10), min_size=1, max_size=7).map(Polynomial)
small_polys = st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=5).map(Polynomial)
half_points = st.integers(min_value=-4, max_value=4).map(lambda k: k / 2)
dyadic_points = st.integers(min_value=-16, max_value=16).map(lambda k: k / 8)
dyadic_scalars = st.integers(min_value=-8, max_value=8).map(lambda k: k / 4)
analytic = st.sampled_from(["sin(x)", "cos(x)", "exp(x)"])


def _x(text):
    return parse_expr(text)


# =============================================================================
# Jets
# =============================================================================

@settings(max_examples=200, deadline=None)
@given(integer_polys, dyadic_points, st.integers(min_value=0, max_value=8))
def test_jet_matches_polynomial_oracle(p, a, n):
    assert nth_derivative(p.to_expr(), "x", n, a) == p.deriv(n)(a)


@settings(max_examples=200, deadline=None)
@given(integer_polys, integer_polys, dyadic_scalars, dyadic_scalars, dyadic_points, st.integers(min_value=0, max_value=6))
def test_derivative_is_linear(p, q, alpha, beta, a, n):
    combined = parse_expr(f"{alpha!r} * ({show(p.to_expr())}) + {beta!r} * ({show(q.to_expr())})")
    expected = alpha * nth_derivative(p.to_expr(), "x", n, a) + beta * nth_derivative(q.to_expr(), "x", n, a)
    assert nth_derivative(combined, "x", n, a) == expected


def test_demo_quartic():
    h = demo_h()
    oracle = Polynomial((-6, 2, -5, 3, -2))
    for t in (-1.5, -0.25, 0.0, 0.5, 2.0):
        assert eval_real(h, {"t": Real(t)}) == oracle(t)
        for k in range(5):
            assert nth_derivative(h, "t", k, t) == oracle.deriv(k)(t)
        assert nth_derivative(h, "t", 5, t) == 0.0
        assert nth_derivative(h, "t", 9, t) == 0.0


@pytest.mark.parametrize("text, a, n, expected", [
    ("exp(x)", 0.0, 5, 1.0),
    ("sin(x)", 0.0, 3, -1.0),
    ("cos(x)", 0.0, 4, 1.0),
    ("ln(x)", 1.0, 3, 2.0),
    ("sqrt(x)", 4.0, 1, 0.25),
    ("1 / x", 2.0, 2, 0.25),
    ("x ^ 0.5", 4.0, 1, 0.25),
    ("2 ^ x", 0.0, 1, math.log(2)),
])
def test_known_derivatives(text, a, n, expected):
    assert nth_derivative(_x(text), "x", n, a) == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_derivative_through_function_binding():
    funcs = {"f": FunctionDef("x", _x("x ^ 3"))}
    e = parse_expr("f(2 * y)", functions=funcs)
    # d^2/dy^2 (2y)^3 = 48 y
    assert nth_derivative(e, "y", 2, 1.0, funcs=funcs) == 48.0


def test_extended_precision_jet():
    arith = extended(60)
    jet = jet_eval(_x("exp(x)"), "x", 1.0, 3, arith=arith)
    assert jet.derivative(3) == pytest.approx(math.e, rel=1e-15)
    assert abs(jet.coeffs[3] * 6 - arith.exp(arith.num(1))) < arith.num(10) ** -50


def test_order_cap():
    with pytest.raises(ValueError):
        jet_eval(_x("x"), "x", 0.0, 25)


@pytest.mark.parametrize("text, a", [("|x|", 0.0), ("sqrt(x)", 0.0), ("⌊x⌋", 2.0), ("max(x, 0)", 0.0)])
def test_kinks_are_not_differentiable(text, a):
    assert not is_differentiable(_x(text), "x", a, 1)
    with pytest.raises(NonSmoothError):
        jet_eval(_x(text), "x", a, 1)


def test_smooth_away_from_kinks():
    assert is_differentiable(_x("|x|"), "x", 1.0, 3)
    assert nth_derivative(_x("|x|"), "x", 1, -2.0) == -1.0
    assert nth_derivative(_x("⌊x⌋ * x"), "x", 1, 2.5) == 2.0


# =============================================================================
# Finite differences
# =============================================================================

def test_finite_differences_on_known_functions():
    assert nth_derivative_fd(_x("x^2"), 2, 1.0) == pytest.approx(2.0, abs=1e-6)
    assert nth_derivative_fd(_x("exp(x)"), 3, 0.0) == pytest.approx(1.0, abs=1e-4)
    assert nth_derivative_fd(math.sin, 1, 0.0) == pytest.approx(1.0, abs=1e-8)
    assert nth_derivative_fd(_x("x^3"), 0, 2.0) == 8.0


@settings(max_examples=100, deadline=None)
@given(analytic, st.floats(min_value=-2, max_value=2), st.integers(min_value=1, max_value=3))
def test_jets_agree_with_finite_differences(text, a, n):
    exact = nth_derivative(_x(text), "x", n, a)
    assert abs(nth_derivative_fd(_x(text), n, a) - exact) <= 1e-3 * max(1.0, abs(exact))


# =============================================================================
# Taylor polynomials and remainders
# =============================================================================

def test_taylor_poly_of_sin():
    poly = taylor_poly(_x("sin(x)"), "x", 0.0, 3)
    assert poly.coeffs == pytest.approx((0.0, 1.0, 0.0, -1 / 6))
    assert poly.degree == 3
    assert poly(0.1) == pytest.approx(math.sin(0.1), abs=1e-6)
    assert eval_real(poly.to_expr(), {"x": Real(0.1)}) == pytest.approx(poly(0.1))


def test_lagrange_witness_cubic():
    w = lagrange_witness(_x("x^3"), "x", 2, 0.0, 0.9)
    assert w.localized
    assert w.t == pytest.approx(0.3, abs=1e-9)


def test_lagrange_witness_exp():
    w = lagrange_witness(_x("exp(x)"), "x", 1, 0.0, 1.0)
    assert w.sign_change
    assert w.t == pytest.approx(math.log(math.e - 1), abs=1e-9)
    assert 0.0 < w.t < 1.0


def test_lagrange_witness_left_of_center():
    w = lagrange_witness(_x("exp(x)"), "x", 2, 0.0, -1.0)
    assert -1.0 < w.t < 0.0
    assert w.localized


def test_lagrange_needs_distinct_points_and_positive_order():
    with pytest.raises(MethodPreconditionError) as info:
        lagrange_witness(_x("x^3"), "x", 2, 0.5, 0.5)
    assert info.value.kind is PreconditionKind.COINCIDENT_POINTS
    with pytest.raises(MethodPreconditionError) as info:
        lagrange_witness(_x("x^3"), "x", 0, 0.0, 0.5)
    assert info.value.kind is PreconditionKind.BAD_ORDER


@pytest.mark.parametrize("text, n", [("exp(x)", 1), ("exp(x)", 2), ("sin(x)", 3), ("ln(1 + x)", 2)])
def test_peano_and_lagrange_forms_agree(text, n):
    e, c, x = _x(text), 0.0, 0.5
    t = lagrange_witness(e, "x", n, c, x).t
    expected = (nth_derivative(e, "x", n, t) - nth_derivative(e, "x", n, c)) / math.factorial(n)
    assert peano_remainder(e, "x", n, c, x, dps=50) == pytest.approx(expected, abs=1e-9)


def test_peano_remainder_of_polynomial_is_exact():
    # x^3 + x^4 around 0 with n = 2: h_2(x) = x + x^2
    assert peano_remainder(_x("x^3 + x^4"), "x", 2, 0.0, 0.5) == 0.75


def test_peano_remainder_extended_precision():
    x = 1e-3
    value = peano_remainder(_x("sin(x)"), "x", 3, 0.0, x, dps=50)
    assert value == pytest.approx(x ** 2 / 120, rel=1e-3)


@pytest.mark.parametrize("text, n", [
    ("exp(x)", 1), ("exp(x)", 3), ("sin(x)", 2), ("cos(x)", 1), ("ln(1 + x)", 2), ("sqrt(1 + x)", 1),
])
def test_peano_probe_passes_for_smooth_functions(text, n):
    report = peano_limit_probe(_x(text), "x", n, 0.0, radii=FINE_RADII)
    assert report.passed
    assert len(report.maxima) == len(FINE_RADII)
    assert len(report.samples) == 2 * len(FINE_RADII)
    assert "not a proof" in report.coverage


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(min_value=0.5, max_value=1.0), min_size=9, max_size=9),
    st.lists(st.booleans(), min_size=9, max_size=9),
    st.integers(min_value=0, max_value=3),
)
def test_peano_probe_on_random_polynomials(magnitudes, signs, n):
    coeffs = [(-m if s else m) * 4.0 ** -k for k, (m, s) in enumerate(zip(magnitudes, signs))]
    report = peano_limit_probe(Polynomial(tuple(coeffs)).to_expr(), "x", n, 0.0, radii=FINE_RADII)
    assert report.passed


def test_peano_probe_rejects_a_kink():
    with pytest.raises(NonSmoothError):
        peano_limit_probe(_x("|x|"), "x", 1, 0.0)


def test_probe_fails_when_radii_stop_too_early():
    # h_1 of exp is about r/2, still 4e-3 at r = 2^-7
    report = peano_limit_probe(_x("exp(x)"), "x", 1, 0.0, radii=FINE_RADII[:10], threshold=1e-6)
    assert not report.passed


def test_probe_radii_must_shrink():
    with pytest.raises(MethodPreconditionError):
        peano_limit_probe(_x("exp(x)"), "x", 1, 0.0, radii=[0.1, 0.2])
    with pytest.raises(MethodPreconditionError):
        peano_limit_probe(_x("exp(x)"), "x", 1, 0.0, radii=[0.1, 0.0])


def test_taylor_limit_probe():
    report = taylor_limit_probe(_x("exp(x)"), "x", 2, 0.0, radii=FINE_RADII)
    assert report.limit == pytest.approx(0.5)
    assert report.passed
    record = report.to_record()
    assert record["kind"] == "taylor-limit"
    assert record["passed"] is True


def test_decays():
    assert decays([1e-2, 1e-4, 1e-8, 1e-9, 1e-10, 1e-11], 1e-6)
    assert not decays([1e-2, 1e-4, 1e-8, 1e-3, 1e-10, 1e-11], 1e-6)
    assert not decays([], 1e-6)


# =============================================================================
# Leibniz
# =============================================================================

def test_leibniz_monomials():
    check = leibniz_product_check(_x("x^2"), _x("x^3"), "x", 5, 0.7)
    assert check.holds
    assert check.lhs == pytest.approx(120.0)


@settings(max_examples=200, deadline=None)
@given(small_polys, small_polys, half_points, st.integers(min_value=0, max_value=6))
def test_leibniz_exact_on_polynomials(p, q, a, n):
    check = leibniz_product_check(p.to_expr(), q.to_expr(), "x", n, a)
    assert check.error == 0.0
    assert check.holds


@settings(max_examples=200, deadline=None)
@given(analytic, analytic, st.floats(min_value=-1, max_value=1), st.integers(min_value=0, max_value=4))
def test_leibniz_on_analytic_pairs(f, g, x, n):
    check = leibniz_product_check(_x(f), _x(g), "x", n, x)
    assert check.holds
    assert check.error <= 32 * math.ulp(max(abs(check.lhs), abs(check.rhs), 1.0))


def test_leibniz_with_cancelling_terms():
    # the binomial terms alternate in sign and sum to the zero derivative of exp(x) exp(-x)
    check = leibniz_product_check(_x("exp(x)"), _x("exp(-x)"), "x", 8, 0.9)
    assert check.holds
    assert check.lhs == pytest.approx(0.0, abs=1e-12)
    assert check.error <= 32 * math.ulp(1.0)


def test_leibniz_lhs_agrees_with_the_binary64_jet():
    lhs = leibniz_product_check(_x("sin(x)"), _x("x^3"), "x", 4, 0.5).lhs
    assert lhs == pytest.approx(nth_derivative(_x("sin(x) * x^3"), "x", 4, 0.5), rel=1e-12)
