"""
Higher-order differentiation and Taylor remainder analysis.

Core modules:
- jet: truncated Taylor arithmetic on expression trees (binary64 or mpmath)
- finite_diff: central-difference oracle for black-box functions
- taylor: Taylor polynomials, Lagrange witnesses, Peano probes, Leibniz check
- poly: dense polynomials and the demo quartic
"""

from .jet import Jet, JetEvaluator, FloatArith, MpArith, FLOAT, extended, jet_eval, nth_derivative, value_at, is_differentiable
from .finite_diff import nth_derivative_fd, default_step
from .taylor import (
    TaylorPoly, taylor_poly, LagrangeWitness, lagrange_witness,
    peano_remainder, ProbeReport, peano_limit_probe, taylor_limit_probe, decays,
    LeibnizCheck, leibniz_product_check,
)
from .poly import Polynomial, demo_h

__all__ = [
    # Jets
    "Jet", "JetEvaluator", "FloatArith", "MpArith", "FLOAT", "extended",
    "jet_eval", "nth_derivative", "value_at", "is_differentiable",
    # Finite differences
    "nth_derivative_fd", "default_step",
    # Taylor
    "TaylorPoly", "taylor_poly", "LagrangeWitness", "lagrange_witness",
    "peano_remainder", "ProbeReport", "peano_limit_probe", "taylor_limit_probe", "decays",
    "LeibnizCheck", "leibniz_product_check",
    # Polynomials
    "Polynomial", "demo_h",
]
