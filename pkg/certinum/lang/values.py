"""
Runtime values of the program notation.

Three sorts of data value (Real, Nat, Vec) plus function bindings for
parameters of sort `fun`. All are immutable.
"""

import math
from dataclasses import dataclass
from typing import Union

from ..errors import EvalError


@dataclass(frozen=True)
class Real:
    """binary64 real."""
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))

    def as_float(self) -> float:
        return self.value


@dataclass(frozen=True)
class Nat:
    """Exact nonnegative integer."""
    value: int

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise EvalError(f"Nat requires an int, got {self.value!r}")
        if self.value < 0:
            raise EvalError(f"Nat cannot be negative: {self.value}")

    def as_float(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class Vec:
    """Fixed-length sequence of binary64 reals."""
    items: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(float(x) for x in self.items))

    def __len__(self) -> int:
        return len(self.items)

    def get(self, index: int) -> float:
        if not 0 <= index < len(self.items):
            raise EvalError(f"vector index {index} out of range 0..{len(self.items) - 1}")
        return self.items[index]

    def set(self, index: int, value: float) -> "Vec":
        self.get(index)
        items = list(self.items)
        items[index] = float(value)
        return Vec(tuple(items))

    def as_float(self) -> float:
        raise EvalError("vector used where a number is expected")


Value = Union[Real, Nat, Vec]


def is_integral(value: Value) -> bool:
    """Nat, or a Real holding a finite integer."""
    if isinstance(value, Nat):
        return True
    if isinstance(value, Real):
        return math.isfinite(value.value) and value.value == math.floor(value.value)
    return False


def to_python(value: Value):
    """Plain JSON-compatible form: float, int or list of floats."""
    if isinstance(value, Vec):
        return list(value.items)
    return value.value


def from_python(raw) -> Value:
    """Inverse of to_python (ints become Nat, floats Real, lists Vec)."""
    if isinstance(raw, bool):
        raise EvalError(f"cannot convert {raw!r} to a value")
    if isinstance(raw, int):
        return Nat(raw) if raw >= 0 else Real(float(raw))
    if isinstance(raw, float):
        return Real(raw)
    if isinstance(raw, (list, tuple)):
        return Vec(tuple(raw))
    raise EvalError(f"cannot convert {raw!r} to a value")
