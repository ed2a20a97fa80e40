"""Sampling and enumerating the level construction: gap ``i`` is uniform on ``[1, Delta**rho_i]``."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..distkit import FiniteDist, check_budget
from ..errors import BadParam, Overflow
from .levels import check_level_perm, level_distribution

__all__ = [
    "GoogolInstance",
    "level_construction_dist",
    "level_value_bound",
    "sample_instance",
    "sample_levels",
]

INT64_MAX = 2**63 - 1


def level_value_bound(n: int, delta: int) -> int:
    """``N = sum_i Delta**i``: the largest value the construction can produce."""
    return sum(delta**i for i in range(1, n + 1))


def _check(n: int, delta: int) -> None:
    if n < 1:
        raise BadParam(f"need n >= 1, got {n}")
    if delta < 2:
        raise BadParam(f"need Delta >= 2, got {delta}")


@dataclass(frozen=True)
class GoogolInstance:
    n: int
    delta: int
    rho: tuple[int, ...]
    gaps: tuple[int, ...]
    values: tuple[int, ...]
    N: int

    def __post_init__(self):
        check_level_perm(self.rho)
        if any(not 1 <= d <= self.delta**r for d, r in zip(self.gaps, self.rho)):
            raise BadParam(f"gaps {self.gaps} outside their level ranges")
        if tuple(itertools.accumulate(self.gaps)) != self.values:
            raise BadParam("values must be the prefix sums of the gaps")


def sample_levels(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` level permutations drawn from ``F^lev`` as an ``(size, n)`` array."""
    F = level_distribution(n)
    states = np.array(list(F.support), dtype=np.int64)
    probs = np.array([float(w) for w in F.weights])
    idx = rng.choice(len(states), size=size, p=probs / probs.sum())
    return states[idx]


def sample_instance(n: int, delta: int, rng: np.random.Generator) -> GoogolInstance:
    """Draw ``rho ~ F^lev`` and independent gaps ``d_i ~ Uni[Delta**rho_i]``."""
    _check(n, delta)
    if delta**n > INT64_MAX:
        raise Overflow(f"Delta**n = {delta}**{n} does not fit in 64 bits")
    rho = tuple(int(x) for x in sample_levels(n, rng, 1)[0])
    gaps = tuple(int(rng.integers(1, delta**r, endpoint=True)) for r in rho)
    return GoogolInstance(n, delta, rho, gaps, tuple(itertools.accumulate(gaps)),
                          level_value_bound(n, delta))


def level_construction_dist(n: int, delta: int, limit: int | None = None) -> FiniteDist:
    """The exact law of the sorted value set produced by the construction."""
    _check(n, delta)
    F = level_distribution(n)
    size = len(F) * delta ** (n * (n + 1) // 2)
    check_budget(size, "level construction", limit)
    acc: dict[tuple, Fraction] = {}
    for rho, p in F.items():
        w = p / delta ** (n * (n + 1) // 2)
        for gaps in itertools.product(*(range(1, delta**r + 1) for r in rho)):
            vals = tuple(itertools.accumulate(gaps))
            acc[vals] = acc.get(vals, Fraction(0)) + w
    return FiniteDist(acc, _trusted=True)
