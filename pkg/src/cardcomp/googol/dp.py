"""Backward induction for the ordinal secretary and for the secretary that also sees gap levels.

In the level game the arrival order ``pi`` lists ranks (``pi[k-1]`` is the
rank of the ``k``-th arrival, ``n`` = maximum).  After ``i`` arrivals with
sorted ranks ``a_1 < ... < a_i`` the player sees the relative ranks ``sigma``
and the levels ``mu_m = max(rho_j : a_{m-1} < j <= a_m)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..distkit import check_budget
from ..errors import BadParam, BudgetExceeded
from ..universal import relative_ranks
from .levels import level_distribution

__all__ = ["LevelDP", "SecretaryDP", "level_secretary_dp", "observed_levels", "ordinal_secretary_dp"]


@dataclass
class SecretaryDP:
    """``f_i`` collapsed to whether the ``i``-th arrival is the best so far."""

    n: int
    f_max: list[Fraction]    # index i-1: f_i when arrival i is a prefix maximum
    f_other: list[Fraction]  # index i-1: f_i otherwise (the continuation value)
    value: Fraction

    def f(self, sigma) -> Fraction:
        i = len(sigma)
        return self.f_max[i - 1] if sigma[-1] == i else self.f_other[i - 1]

    @property
    def threshold(self) -> int:
        """First step at which accepting a prefix maximum is optimal."""
        return next(i for i in range(1, self.n + 1) if Fraction(i, self.n) >= self.f_other[i - 1])


def ordinal_secretary_dp(n: int, max_n: int = 10) -> SecretaryDP:
    if n < 1:
        raise BadParam(f"need n >= 1, got {n}")
    if n > max_n:
        raise BudgetExceeded(f"n={n} exceeds the DP cap {max_n}")
    f_max = [Fraction(0)] * n
    f_other = [Fraction(0)] * n
    f_max[n - 1] = Fraction(1)
    for i in range(n - 1, 0, -1):
        # arrival i+1 is a prefix maximum with probability 1/(i+1)
        cont = (f_max[i] + i * f_other[i]) / (i + 1)
        f_other[i - 1] = cont
        f_max[i - 1] = max(Fraction(i, n), cont)
    return SecretaryDP(n, f_max, f_other, f_max[0])


def observed_levels(rho, ranks) -> tuple[int, ...]:
    """Levels of the gaps below each arrived rank, merged by max."""
    out, lo = [], 0
    for a in sorted(ranks):
        out.append(max(rho[lo:a]))
        lo = a
    return tuple(out)


@dataclass
class LevelDP:
    n: int
    g: dict                      # (i, mu, sigma) -> g_i
    value: Fraction
    ordinal: SecretaryDP
    mismatches: list = field(default_factory=list)        # states with g != f
    accept_mismatches: list = field(default_factory=list)  # prefix-max states with P[win] != i/n
    history_induced: bool = True
    states: int = 0

    @property
    def equal(self) -> bool:
        return not self.mismatches and not self.accept_mismatches and self.value == self.ordinal.value

    def to_dict(self) -> dict:
        q = lambda x: f"{x.numerator}/{x.denominator}"  # noqa: E731
        return {
            "n": self.n,
            "level_value": q(self.value),
            "ordinal_value": q(self.ordinal.value),
            "states": self.states,
            "g_equals_f": not self.mismatches,
            "accept_prob_is_i_over_n": not self.accept_mismatches,
            "history_induced": self.history_induced,
        }


def level_secretary_dp(n: int, max_n: int = 6) -> LevelDP:
    """Exact ``g`` by enumerating every ``(pi, rho)`` pair, compared state by state with ``f``."""
    if n < 1:
        raise BadParam(f"need n >= 1, got {n}")
    if n > max_n:
        raise BudgetExceeded(f"n={n} exceeds the level-DP cap {max_n}")
    F = level_distribution(n)
    check_budget(math.factorial(n) * len(F) * n, "level secretary DP")
    scale = math.lcm(*(w.denominator for w in F.weights))
    rho_w = [(rho, int(w * scale)) for rho, w in F.items()]

    weight = [dict() for _ in range(n)]   # step i-1 -> state -> mass
    win = [dict() for _ in range(n)]      # mass with the current arrival the maximum
    child = [dict() for _ in range(n)]    # step i-1 -> state -> {next state: mass}
    parent: dict = {}
    induced = True
    for pi in itertools.permutations(range(1, n + 1)):
        for rho, w in rho_w:
            prev = None
            for i in range(1, n + 1):
                s = (observed_levels(rho, pi[:i]), relative_ranks(pi[:i]))
                weight[i - 1][s] = weight[i - 1].get(s, 0) + w
                if pi[i - 1] == n:
                    win[i - 1][s] = win[i - 1].get(s, 0) + w
                if prev is not None:
                    c = child[i - 2].setdefault(prev, {})
                    c[s] = c.get(s, 0) + w
                    if parent.setdefault((i, s), prev) != prev:
                        induced = False
                prev = s

    ordinal = ordinal_secretary_dp(n, max_n=max(n, 10))
    g: dict = {}
    mismatches, accept_bad = [], []
    for i in range(n, 0, -1):
        for s, m in weight[i - 1].items():
            mu, sigma = s
            if i == n:
                val = Fraction(int(sigma[-1] == n))
            else:
                kids = child[i - 1][s]
                val = sum((Fraction(mk) * g[(i + 1,) + k] for k, mk in kids.items()), Fraction(0)) / m
                if sigma[-1] == i:
                    p_win = Fraction(win[i - 1].get(s, 0), m)
                    if p_win != Fraction(i, n):
                        accept_bad.append((i, mu, sigma, p_win))
                    val = max(p_win, val)
            g[(i,) + s] = val
            if val != ordinal.f(sigma):
                mismatches.append((i, mu, sigma, val, ordinal.f(sigma)))
    total = sum(weight[0].values())
    value = sum((Fraction(m) * g[(1,) + s] for s, m in weight[0].items()), Fraction(0)) / total
    return LevelDP(n, g, value, ordinal, mismatches, accept_bad, induced, len(g))
