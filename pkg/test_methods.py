"""
Tests for bisection, fixed-point iteration and the convergence certificates.
"""

import math

import numpy as np
import pytest

from certinum.errors import MethodPreconditionError, PreconditionKind
from certinum.hoare import check_annotations
from certinum.interp import run
from certinum.methods import (
    bisect, predicted_iterations, fixed_point, is_fixed_point, contraction_estimate,
    check_contraction_closure, linear_error_certificate, c1_certificate, quadratic_certificate,
    quadratic_bound, certify, rounding_slack, CertificateKind,
    bisection_program, fixed_point_program,
)

NEWTON_SQRT3 = "(3/x + x)/2"
SQRT3 = math.sqrt(3)


def bisection_instances(count=1000, seed=0xC0FFEE):
    """(a, b, tol, root): half on a dyadic grid with power-of-two width ratios, half arbitrary."""
    rng = np.random.default_rng(seed)
    instances = []
    for k in range(count):
        if k % 2 == 0:
            i = int(rng.integers(-4096, 4096))
            a = i / 1024
            b = (i + int(rng.integers(1, 4096))) / 1024
            tol = (b - a) / 2.0 ** int(rng.integers(1, 40))
        else:
            a = float(rng.uniform(-10, 10))
            b = a + float(rng.uniform(1e-3, 10))
            tol = (b - a) * float(rng.uniform(1e-9, 0.9))
        root = a + (b - a) * float(rng.uniform(0.01, 0.99))
        instances.append((a, b, tol, root))
    return instances


# =============================================================================
# Bisection
# =============================================================================

def test_bisect_sqrt2():
    result = bisect("x^2 - 2", 1.0, 1.5, 1e-4)
    assert result.root == pytest.approx(1.41421508789, abs=1e-11)
    assert result.xmid == 1.41424560546875
    assert result.xmid == result.upper
    assert result.lower < math.sqrt(2) < result.upper
    assert result.iter == 13
    assert result.predicted_iter == 13
    assert result.bracket_width <= 1e-4
    assert len(result.history) == 14
    assert result.to_record()["iter"] == 13
    assert result.to_record()["root"] == result.root


def test_predicted_iterations():
    assert predicted_iterations(0.0, 1.0, 0.5) == 1
    assert predicted_iterations(0.0, 1.0, 2.0 ** -20) == 20
    assert predicted_iterations(0.0, 1.0, 0.3) == 2


@pytest.mark.parametrize("a, b, tol, kind", [
    (0.0, 2.0, 0.0, PreconditionKind.NONPOSITIVE_TOL),
    (0.0, 2.0, -1.0, PreconditionKind.NONPOSITIVE_TOL),
    (0.0, 2.0, 2.0, PreconditionKind.OVERSIZED_TOL),
    (2.0, 2.0, 0.1, PreconditionKind.DEGENERATE_BRACKET),
    (2.0, 3.0, 0.1, PreconditionKind.NO_SIGN_CHANGE),
])
def test_bisect_preconditions(a, b, tol, kind):
    with pytest.raises(MethodPreconditionError) as info:
        bisect("x^2 - 2", a, b, tol)
    assert info.value.kind is kind


def test_iteration_count_is_exact_on_seeded_instances():
    for a, b, tol, root in bisection_instances():
        result = bisect(lambda x, root=root: x - root, a, b, tol)
        assert result.iter == predicted_iterations(a, b, tol), (a, b, tol)
        assert result.bracket_width <= tol
        assert result.lower <= root <= result.upper


def test_annotations_hold_on_every_seeded_instance():
    for a, b, tol, root in bisection_instances():
        report = check_annotations(bisection_program(), {"f": f"x - {root!r}", "a": a, "b": b, "tol": tol})
        assert report.passed, report.counterexamples[0].to_record()


def test_annotations_hold_when_the_tolerance_sits_just_below_a_power_of_two():
    tol = math.nextafter(2.0 ** -10, 0.0)
    assert bisect("x - 0.3", 0.0, 1.0, tol).iter == predicted_iterations(0.0, 1.0, tol) == 11
    report = check_annotations(bisection_program(), {"f": "x - 0.3", "a": 0.0, "b": 1.0, "tol": tol})
    assert report.passed


def test_native_bisection_matches_the_interpreter():
    for a, b, tol, root in bisection_instances():
        native = bisect(f"x - {root!r}", a, b, tol)
        outcome = run(bisection_program(), {"f": f"x - {root!r}", "a": a, "b": b, "tol": tol})
        assert outcome.state.vars["xmid"].value == native.xmid
        assert outcome.state.vars["lower"].value == native.lower
        assert outcome.state.vars["upper"].value == native.upper
        assert outcome.state.vars["iter"].value == native.iter


# =============================================================================
# Fixed-point iteration
# =============================================================================

def test_fixed_point_sqrt3():
    result = fixed_point(NEWTON_SQRT3, 1.0, 1e-3, 10)
    assert result.x == pytest.approx(1.73205081001, abs=1e-10)
    assert result.itr == 4
    assert result.converged
    assert result.trajectory[0] == 1.0
    assert len(result.trajectory) == 5
    assert result.trigger[0] == 3


def test_fixed_point_of_the_identity_stops_after_one_step():
    result = fixed_point("x", 5.0, 0.1, 10)
    assert result.x == 5.0
    assert result.itr == 1
    assert result.converged
    assert result.trigger == (0, 0.0)
    assert result.trajectory == [5.0, 5.0]


def test_fixed_point_stops_at_max_iter():
    result = fixed_point("x/2 + 1", 10.0, 1e-12, 3)
    assert result.itr == 3
    assert not result.converged
    assert result.trajectory == [10.0, 6.0, 4.0, 3.0]


def test_fixed_point_zero_iterations():
    result = fixed_point(NEWTON_SQRT3, 1.6, 1e-3, 0)
    assert result.x == 1.6
    assert result.itr == 0


def test_fixed_point_preconditions():
    with pytest.raises(MethodPreconditionError) as info:
        fixed_point(NEWTON_SQRT3, 1.0, 1e-3, -1)
    assert info.value.kind is PreconditionKind.NEGATIVE_MAX_ITER
    with pytest.raises(MethodPreconditionError) as info:
        fixed_point(NEWTON_SQRT3, 1.0, 0.0, 5)
    assert info.value.kind is PreconditionKind.NONPOSITIVE_TOL


@pytest.mark.parametrize("x0, tol, max_iter", [(1.0, 1e-3, 10), (1.9, 1e-8, 20), (1.6, 0.5, 3), (3.0, 1e-12, 0)])
def test_native_fixed_point_matches_the_interpreter(x0, tol, max_iter):
    native = fixed_point(NEWTON_SQRT3, x0, tol, max_iter)
    outcome = run(fixed_point_program(), {"f": NEWTON_SQRT3, "x0": x0, "tol": tol, "max_iter": max_iter})
    assert outcome.state.vars["x"].value == native.x
    assert outcome.state.vars["itr"].value == native.itr
    assert outcome.state.vars["Break"].value == native.break_flag


def test_is_fixed_point():
    from certinum.lang import as_function
    g = as_function(NEWTON_SQRT3)
    assert is_fixed_point(g, SQRT3)
    assert not is_fixed_point(g, 1.7)


def test_contraction_estimate():
    assert contraction_estimate(NEWTON_SQRT3, SQRT3, 0.2, seed=1) < 0.2
    assert contraction_estimate("x/2", 0.0, 5.0, seed=1) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(MethodPreconditionError):
        contraction_estimate("x/2", 0.0, 0.0)


def test_contraction_closure():
    assert check_contraction_closure(NEWTON_SQRT3, SQRT3, 0.2, 0.2, 10)
    assert not check_contraction_closure("2*x - 1", 1.0, 0.5, 0.5, 10)
    with pytest.raises(MethodPreconditionError):
        check_contraction_closure(NEWTON_SQRT3, SQRT3, 1.0, 0.2, 10)


# =============================================================================
# Certificates
# =============================================================================

def test_linear_certificate_on_seeded_affine_contractions():
    rng = np.random.default_rng(0xC0FFEE)
    for _ in range(50):
        c = float(rng.uniform(-1.0, 1.0))
        r = float(rng.uniform(0.5, 10)) * (1 if rng.random() < 0.5 else -1)
        d = r - c * r
        x0 = r + float(rng.uniform(-5, 5))
        f = f"{c!r} * x + {d!r}"
        trajectory = fixed_point(f, x0, 1e-300, 30)
        cert = linear_error_certificate(f, r, abs(c), trajectory)
        assert cert.holds, cert.failures[:3]
        assert len(cert.entries) == len(trajectory.trajectory)


def test_linear_certificate_for_newton_near_the_root():
    run_ = fixed_point(NEWTON_SQRT3, 1.6, 1e-3, 10)
    cert = linear_error_certificate(NEWTON_SQRT3, SQRT3, 0.2, run_)
    assert cert.holds
    assert cert.entries[0].bound == abs(1.6 - SQRT3)


def test_linear_certificate_fails_outside_the_ball():
    # from x0 = 1 the first Newton step overshoots to 2
    cert = linear_error_certificate(NEWTON_SQRT3, SQRT3, 0.2, fixed_point(NEWTON_SQRT3, 1.0, 1e-3, 10))
    assert not cert.holds
    assert cert.failures[0].n == 1


def test_linear_certificate_preconditions():
    with pytest.raises(MethodPreconditionError) as info:
        linear_error_certificate(NEWTON_SQRT3, 1.7, 0.2, [1.7])
    assert info.value.kind is PreconditionKind.NOT_A_FIXED_POINT
    with pytest.raises(MethodPreconditionError) as info:
        linear_error_certificate(NEWTON_SQRT3, SQRT3, 1.0, [1.7])
    assert info.value.kind is PreconditionKind.NOT_A_CONTRACTION
    with pytest.raises(MethodPreconditionError) as info:
        linear_error_certificate(NEWTON_SQRT3, SQRT3, 0.2, [])
    assert info.value.kind is PreconditionKind.MISSING_TRAJECTORY


def test_rounding_slack_scales_with_magnitude():
    assert rounding_slack(1.0, 1.0) == 16 * math.ulp(1.0)
    assert rounding_slack(1e6, 0.0) == 16 * math.ulp(1e6)


def test_c1_certificate_for_newton():
    delta, eps, cert = c1_certificate(NEWTON_SQRT3, SQRT3, 1e-3, 50)
    assert delta == pytest.approx(SQRT3 / 4)
    assert eps == pytest.approx(0.5)
    assert cert.holds
    assert cert.kind is CertificateKind.C1


def test_c1_certificate_for_an_affine_map():
    delta, eps, cert = c1_certificate("x/2 + 1", 2.0, 1e-3, 50)
    assert eps == pytest.approx(0.25)
    assert delta == 1.0
    assert cert.holds


def test_c1_certificate_rejects_an_expansion():
    with pytest.raises(MethodPreconditionError) as info:
        c1_certificate("2*x - 1", 1.0, 1e-3, 50)
    assert info.value.kind is PreconditionKind.DERIVATIVE_TOO_LARGE


def test_quadratic_certificate_for_squaring():
    delta, eps, cert = quadratic_certificate("x^2", 0.0, 1e-3, 20)
    assert delta == 0.25
    assert cert.parameters["C"] == 1.25
    assert cert.holds


def test_quadratic_certificate_for_newton():
    delta, eps, cert = quadratic_certificate(NEWTON_SQRT3, SQRT3, 1e-3, 20)
    assert 0 < delta <= SQRT3 / 4
    assert cert.holds


def test_quadratic_certificate_needs_a_flat_fixed_point():
    with pytest.raises(MethodPreconditionError) as info:
        quadratic_certificate("x/2 + 1", 2.0, 1e-3, 20)
    assert info.value.kind is PreconditionKind.DERIVATIVE_NONZERO


def squared_error_ratios(cert):
    """E_k / E_(k-1)^2 along each trajectory, skipping errors already at rounding level."""
    ratios = []
    for prev, cur in zip(cert.entries, cert.entries[1:]):
        if cur.x0 != prev.x0 or cur.n != prev.n + 1 or prev.measured == 0:
            continue
        if cur.measured > rounding_slack(cur.x0, cert.r):
            ratios.append(cur.measured / prev.measured ** 2)
    return ratios


@pytest.mark.parametrize("f, r", [("x^2", 0.0), (NEWTON_SQRT3, SQRT3)])
def test_quadratic_ratio_stays_below_the_constant(f, r):
    _, _, cert = quadratic_certificate(f, r, 1e-3, 20)
    ratios = squared_error_ratios(cert)
    assert ratios
    assert max(ratios) <= cert.parameters["C"] + 1e-3


def test_quadratic_bound():
    assert quadratic_bound(1.25, 0.1, 0) == pytest.approx(0.1)
    assert quadratic_bound(1.25, 0.1, 2) == pytest.approx(1.25 ** 3 * 0.1 ** 4)
    assert quadratic_bound(1.25, 0.1, 12) == 0.0
    assert quadratic_bound(1.25, 0.0, 3) == 0.0


def test_certify_with_oracle_root():
    run_ = fixed_point(NEWTON_SQRT3, 1.6, 1e-3, 10)
    cert = certify("linear", NEWTON_SQRT3, run=run_, c=0.2)
    assert cert.root_source == "oracle"
    assert cert.r == pytest.approx(SQRT3, rel=1e-15)
    assert cert.holds
    assert cert.to_record()["kind"] == "linear"


def test_certify_with_caller_root():
    cert = certify(CertificateKind.C1, NEWTON_SQRT3, r=SQRT3)
    assert cert.root_source == "caller"
    assert cert.holds
