"""
Sample plans: which argument tuples a triple is checked on.

A plan lists explicit instances first, then `count` seeded draws. Draws come
from one numpy generator consumed in parameter order, so for a fixed seed a
larger count only appends samples to the sequence.
"""

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

import numpy as np

from ..config import get_settings

@dataclass(frozen=True)
class Explicit:
    """Cycle through a fixed list of values (numbers, vectors or functions)."""
    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ValueError("explicit generator needs at least one value")

    def draw(self, rng: np.random.Generator, k: int):
        return self.values[k % len(self.values)]


@dataclass(frozen=True)
class Grid:
    """n equispaced points of [lo, hi], visited in order and then repeated."""
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"grid needs at least one point, got {self.n}")

    def draw(self, rng: np.random.Generator, k: int):
        return float(np.linspace(self.lo, self.hi, self.n)[k % self.n])


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float
    length: Optional[int] = None  # vector of this length instead of a scalar

    def draw(self, rng: np.random.Generator, k: int):
        if self.length is None:
            return float(rng.uniform(self.lo, self.hi))
        return tuple(float(v) for v in rng.uniform(self.lo, self.hi, size=self.length))


Generator = Union[Explicit, Grid, Uniform]


@dataclass
class SamplePlan:
    generators: dict[str, Generator] = field(default_factory=dict)
    instances: list[dict] = field(default_factory=list)
    count: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        settings = get_settings()
        if self.count is None:
            self.count = settings.random_samples if self.generators else 0
        if self.seed is None:
            self.seed = settings.seed
        if self.count < 0:
            raise ValueError(f"sample count must be nonnegative, got {self.count}")

    @property
    def size(self) -> int:
        return len(self.instances) + (self.count if self.generators else 0)

    def samples(self) -> Iterator[dict]:
        """Argument maps: explicit instances, then seeded draws."""
        if self.size == 0:
            raise ValueError("sample plan is empty")
        for instance in self.instances:
            yield dict(instance)
        if not self.generators:
            return
        rng = np.random.default_rng(self.seed)
        for k in range(self.count):
            yield {name: gen.draw(rng, k) for name, gen in self.generators.items()}
