"""
Runtime evidence for total-correctness Hoare triples.

Core modules:
- triple: HoareTriple with witnesses for real existentials
- oracles: extended-precision witness oracles
- sampling: seeded sample plans
- checker: trace audits, check_triple, check_annotations, falsify
- specfile: .spec file reader
"""

from .triple import HoareTriple, OracleCall, make_triple, evaluate_witness, split_arguments
from .oracles import ORACLES, bracket_root, fixed_point_root
from .sampling import SamplePlan, Explicit, Grid, Uniform
from .checker import (
    CheckReport, Verdict, VerdictKind, VariantFault,
    audit_trace, variant_series, check_sample, check_triple, check_annotations, falsify,
)
from .specfile import SpecFile, parse_spec, load_spec, parse_arguments

__all__ = [
    # Triples
    "HoareTriple", "OracleCall", "make_triple", "evaluate_witness", "split_arguments",
    # Oracles
    "ORACLES", "bracket_root", "fixed_point_root",
    # Sampling
    "SamplePlan", "Explicit", "Grid", "Uniform",
    # Checking
    "CheckReport", "Verdict", "VerdictKind", "VariantFault",
    "audit_trace", "variant_series", "check_sample", "check_triple", "check_annotations", "falsify",
    # Spec files
    "SpecFile", "parse_spec", "load_spec", "parse_arguments",
]
