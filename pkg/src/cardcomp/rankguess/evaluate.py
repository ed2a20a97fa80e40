"""Exact worst-case evaluation against the perturbing adversary.

For each deleted index ``i`` the adversary sees ``S_{-i}``, shifts every
remaining value by -1, 0 or +1 (clamped to ``[1, N]``) and picks the shift
that minimises ``P[guess = i]``.  Reward ``1/p_i`` for a correct guess makes
the value ``sum_i min P[guess = i]``, whatever ``p`` is.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .. import kernels
from ..errors import BadParam, BudgetExceeded
from .policies import EXP_LEVELS, GuessPolicy

__all__ = [
    "DEFAULT_MAX_N",
    "DeletionCase",
    "RankGuessInstance",
    "perturbations",
    "win_probability",
    "worst_case_breakdown",
    "worst_case_expected_reward",
]

DEFAULT_MAX_N = 9


@dataclass(frozen=True)
class RankGuessInstance:
    """Values ``s_1 < ... < s_n <= N`` with consecutive gaps of at least 20, plus deletion law ``p``."""

    values: tuple[int, ...]
    N: int
    p: tuple[Fraction, ...] | None = None
    min_gap: int = 20

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 2:
            raise BadParam("need at least two values")
        if vals[0] < 1 or vals[-1] > self.N:
            raise BadParam(f"values {vals} not inside [1, {self.N}]")
        if any(b - a < self.min_gap for a, b in zip(vals, vals[1:])):
            raise BadParam(f"consecutive values of {vals} closer than {self.min_gap}")
        n = len(vals)
        p = tuple(Fraction(x) for x in self.p) if self.p is not None else (Fraction(1, n),) * n
        if len(p) != n or any(x <= 0 for x in p) or sum(p) != 1:
            raise BadParam(f"p must be {n} positive weights summing to 1")
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return len(self.values)


def perturbations(m: int):
    """All shift vectors in ``{-1, 0, 1}**m``."""
    return itertools.product((-1, 0, 1), repeat=m)


def _observe(rest: Sequence[int], shift: Sequence[int], N: int) -> tuple[int, ...]:
    return tuple(min(N, max(1, v + d)) for v, d in zip(rest, shift))


@dataclass
class DeletionCase:
    index: int
    min_prob: Fraction
    worst_shift: tuple[int, ...]
    worst_observed: tuple[int, ...]


def worst_case_breakdown(instance: RankGuessInstance, policy: GuessPolicy,
                         max_n: int = DEFAULT_MAX_N) -> list[DeletionCase]:
    """Per deletion: the adversary's minimal ``P[guess = i]`` and the shift achieving it."""
    n = instance.n
    if n > max_n:
        raise BudgetExceeded(f"n={n} exceeds the evaluator cap {max_n}")
    N = instance.N
    cache: dict[tuple, object] = {}
    cases = []
    for i in range(1, n + 1):
        rest = instance.values[: i - 1] + instance.values[i:]
        best = None
        for shift in perturbations(n - 1):
            obs = _observe(rest, shift, N)
            if obs not in cache:
                cache[obs] = policy(obs, N)
            pr = cache[obs].prob(i)
            if best is None or pr < best.min_prob:
                best = DeletionCase(i, pr, shift, obs)
        cases.append(best)
    return cases


def _kernel_mins(instance: RankGuessInstance, kernel: tuple) -> list[Fraction] | None:
    """Per-deletion minima from the int64 kernels, or ``None`` if they do not apply."""
    n, N = instance.n, instance.N
    if kernel[0] == "mono":
        if n < 4 or N >= kernels.INT64_SAFE:
            return None
        units = kernels.mono_gaps_worst_units(np.array(instance.values, dtype=np.int64), N)
        return [Fraction(int(u), 6 * (n - 3)) for u in units]
    if kernel[0] == "exp":
        L = EXP_LEVELS[kernel[1] - 1]
        if n < 3 or (N + 2) * (L + 1) >= kernels.INT64_SAFE:
            return None
        sizes = kernels.exp_gaps_worst_sizes(np.array(instance.values, dtype=np.int64), N, L)
        return [Fraction(0) if s == 0 else Fraction(1, int(s)) for s in sizes]
    return None


def worst_case_expected_reward(instance: RankGuessInstance, policy: GuessPolicy,
                               max_n: int = DEFAULT_MAX_N, *, use_kernel: bool = True) -> Fraction:
    """``sum_i p_i * (1/p_i) * min_shift P[guess = i | shifted S_{-i}]``, exactly."""
    if instance.n > max_n:
        raise BudgetExceeded(f"n={instance.n} exceeds the evaluator cap {max_n}")
    mins = None
    if use_kernel and policy.kernel is not None:
        mins = _kernel_mins(instance, policy.kernel)
    if mins is None:
        mins = [c.min_prob for c in worst_case_breakdown(instance, policy, max_n)]
    return sum((p * (1 / p) * m for p, m in zip(instance.p, mins)), Fraction(0))


def win_probability(values: Sequence[int], N: int, policy: GuessPolicy) -> Fraction:
    """Die-guessing win probability: uniform deletion, no perturbation."""
    vals = tuple(values)
    n = len(vals)
    total = Fraction(0)
    for i in range(1, n + 1):
        total += policy(vals[: i - 1] + vals[i:], N).prob(i)
    return total / n
