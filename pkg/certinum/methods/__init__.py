"""
Numerical methods with their convergence evidence.

Core modules:
- bisection: native bisection and its exact iteration count
- fixed_point: native fixed-point iteration, contraction sampling
- certificates: linear, C1 and quadratic error certificates
- programs: the annotated programs and triples behind both methods
"""

from .bisection import BisectionResult, BisectionStep, bisect, predicted_iterations
from .fixed_point import (
    FixedPointResult, fixed_point, is_fixed_point, contraction_estimate,
    check_contraction_closure, ball_points,
)
from .certificates import (
    Certificate, CertificateEntry, CertificateKind, certify, rounding_slack,
    linear_error_certificate, c1_certificate, quadratic_certificate, quadratic_bound,
)
from .programs import (
    load_program, bisection_program, fixed_point_program, vec_scale_program,
    bisection_triple, fixed_point_triple, vec_scale_triple,
)

__all__ = [
    # Bisection
    "BisectionResult", "BisectionStep", "bisect", "predicted_iterations",
    # Fixed point
    "FixedPointResult", "fixed_point", "is_fixed_point", "contraction_estimate",
    "check_contraction_closure", "ball_points",
    # Certificates
    "Certificate", "CertificateEntry", "CertificateKind", "certify", "rounding_slack",
    "linear_error_certificate", "c1_certificate", "quadratic_certificate", "quadratic_bound",
    # Annotated programs
    "load_program", "bisection_program", "fixed_point_program", "vec_scale_program",
    "bisection_triple", "fixed_point_triple", "vec_scale_triple",
]
