"""
Annotated example programs and their triples.

The program texts live in data/programs/*.gcl so they can be read, diffed
and fed to the CLI as they are.
"""

import logging
from functools import lru_cache
from typing import Optional

from ..config import DATA_PATH
from ..errors import ParseError
from ..hoare.triple import HoareTriple, make_triple
from ..lang.ast import Program
from ..lang.parser import parse_program

logger = logging.getLogger(__name__)

PROGRAMS_PATH = DATA_PATH / "programs"

BISECTION_PRE = "tol > 0 ∧ tol < b - a ∧ f(a) * f(b) < 0"
BISECTION_POST = (
    "∃ c. |f(c)| ≤ 1e-12 ∧ a < c ∧ c < b"
    " ∧ upper - lower ≤ tol"
    " ∧ |c - xmid| ≤ (b - a) / 2^iter"
    " ∧ |c - xmid| ≤ tol"
    " ∧ (b - a) / 2^iter ≤ tol ∧ tol < (b - a) / 2^(iter - 1)"
)
BISECTION_WITNESSES = {"c": "bracket_root(f, lower, upper)"}

FIXED_POINT_PRE = "|r - x0| < delta ∧ tol > 0"
FIXED_POINT_POST = "|x - r| ≤ c ^ itr * |x0 - r| + 16 * ulp(|r| + |x0 - r|) ∧ itr ≤ max_iter"

VEC_SCALE_POST = "∀ k < CARD(X). vc k = n * X k"


@lru_cache(maxsize=None)
def load_program(name: str) -> Program:
    """Parse data/programs/<name>.gcl (cached; programs are immutable)."""
    path = PROGRAMS_PATH / f"{name}.gcl"
    if not path.exists():
        raise ParseError(f"no program named {name!r} in {PROGRAMS_PATH}")
    program = parse_program(path.read_text(encoding="utf-8"))
    logger.debug(f"Loaded program {program.name} from {path}")
    return program


def bisection_program() -> Program:
    return load_program("bisection")


def fixed_point_program() -> Program:
    return load_program("fixed_point")


def vec_scale_program() -> Program:
    return load_program("vec_scale")


def bisection_triple(pre: Optional[str] = None) -> HoareTriple:
    """
    Total correctness of bisection. The root is witnessed by an
    extended-precision bisection inside the final bracket; the iteration
    count is pinned by integer bracketing of (b - a)/2^iter around tol.
    """
    return make_triple(bisection_program(), requires=pre or BISECTION_PRE,
                       ensures=BISECTION_POST, witnesses=BISECTION_WITNESSES)


def fixed_point_triple(r: float, c: float, delta: float) -> HoareTriple:
    """Error bound c^itr |x0 - r| for starts within delta of the fixed point r."""
    return make_triple(fixed_point_program(), requires=FIXED_POINT_PRE, ensures=FIXED_POINT_POST,
                       constants={"r": r, "c": c, "delta": delta})


def vec_scale_triple() -> HoareTriple:
    return make_triple(vec_scale_program(), ensures=VEC_SCALE_POST)
