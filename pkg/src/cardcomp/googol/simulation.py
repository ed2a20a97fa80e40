"""Running a value-seeing googol policy inside the level game by splitting gaps online.

Each level ``l`` gets one draw ``r_l ~ Uni[Delta**l]``; the run fails when
some ``r_l <= r_1 + ... + r_{l-1}``.  At step 1 the only gap is ``r_n``.
When an arrival splits a visible gap, the part at the smaller level becomes
``r`` of that level and the larger part keeps the remainder; an arrival
above every earlier one opens a new top gap equal to ``r`` of its level.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .. import kernels
from ..distkit import check_budget
from ..errors import BadParam
from .dp import observed_levels, ordinal_secretary_dp
from .instances import level_value_bound, sample_levels
from .levels import level_states

__all__ = [
    "GoogolPolicy",
    "SimRun",
    "SimExactReport",
    "TrialsReport",
    "appc_simulation",
    "appc_trials",
    "failure_bound",
    "make_googol_policy",
    "split_gaps",
    "verify_sim_exact",
]

# values of the arrivals so far (arrival order, last = current) and the bound N -> accept?
GoogolPolicy = Callable[[tuple, int], bool]


def failure_bound(n: int, delta: int) -> Fraction:
    return Fraction(n - 1, delta - 1)


def _failed(r: Sequence[int]) -> bool:
    total = 0
    for x in r:
        if x <= total:
            return True
        total += x
    return False


def split_gaps(pi: Sequence[int], rho: Sequence[int], r: Sequence[int]):
    """Per-step ``(levels, gaps, value by rank)`` produced by the online splitting.

    ``r[l-1]`` is the draw for level ``l``.  No failure check is made here.
    """
    n = len(pi)
    steps = []
    ranks: list[int] = []
    gaps: list[int] = []
    levels: tuple[int, ...] = ()
    for k in range(1, n + 1):
        q = pi[k - 1]
        j = sum(1 for a in ranks if a < q)  # 0-based slot of the new arrival
        ranks = sorted(ranks + [q])
        new_levels = observed_levels(rho, ranks)
        if k == 1:
            gaps = [r[new_levels[0] - 1]]
        elif j == k - 1:
            gaps = gaps + [r[new_levels[-1] - 1]]
        else:
            old = gaps[j]
            lo, hi = new_levels[j], new_levels[j + 1]
            if lo < hi:
                part = [r[lo - 1], old - r[lo - 1]]
            else:
                part = [old - r[hi - 1], r[hi - 1]]
            gaps = gaps[:j] + part + gaps[j + 1:]
        levels = new_levels
        vals = dict(zip(ranks, itertools.accumulate(gaps)))
        steps.append((levels, tuple(gaps), vals))
    return steps


@dataclass
class SimRun:
    pi: tuple[int, ...]
    rho: tuple[int, ...]
    r: tuple[int, ...]
    failed: bool
    actions: tuple[int, ...]
    gaps: tuple[int, ...] | None
    consistent: bool
    won: bool


def _consistent(steps, delta: int) -> bool:
    prev: dict = {}
    for levels, gaps, vals in steps:
        if any(g < 1 or g > delta**lv for g, lv in zip(gaps, levels)):
            return False
        if any(vals[a] != v for a, v in prev.items()):
            return False
        prev = vals
    return True


def _play(pi, rho, r, delta: int, policy: GoogolPolicy) -> SimRun:
    n = len(pi)
    if _failed(r):
        return SimRun(tuple(pi), tuple(rho), tuple(r), True, (), None, True, False)
    steps = split_gaps(pi, rho, r)
    N = level_value_bound(n, delta)
    actions = []
    won = False
    for k in range(1, n + 1):
        seen = tuple(steps[k - 1][2][a] for a in pi[:k])
        take = bool(policy(seen, N))
        actions.append(int(take))
        if take:
            won = pi[k - 1] == n
            break
    return SimRun(tuple(pi), tuple(rho), tuple(r), False, tuple(actions), steps[-1][1],
                  _consistent(steps, delta), won)


def _check_args(n: int, delta: int) -> None:
    if n < 1:
        raise BadParam(f"need n >= 1, got {n}")
    if delta < n + 1:
        raise BadParam(f"need Delta >= n + 1, got Delta={delta}, n={n}")


def appc_simulation(n: int, delta: int, policy: GoogolPolicy, rng: np.random.Generator, *,
                    pi: Sequence[int] | None = None, rho: Sequence[int] | None = None) -> SimRun:
    """One run: uniform ``pi`` and ``rho ~ F^lev`` unless given, fresh level draws."""
    _check_args(n, delta)
    if pi is None:
        pi = tuple(int(x) for x in rng.permutation(n) + 1)
    if rho is None:
        rho = tuple(int(x) for x in sample_levels(n, rng, 1)[0])
    r = tuple(int(rng.integers(1, delta**lv, endpoint=True)) for lv in range(1, n + 1))
    return _play(tuple(pi), tuple(rho), r, delta, policy)


@dataclass
class TrialsReport:
    n: int
    delta: int
    trials: int
    failures: int
    failure_rate: float
    failure_stderr: float
    bound: Fraction
    wins: int
    win_rate: float
    win_stderr: float
    all_consistent: bool

    @property
    def within_bound(self) -> bool:
        return self.failure_rate <= float(self.bound) + 3 * self.failure_stderr

    def to_dict(self) -> dict:
        return {
            "n": self.n, "delta": self.delta, "trials": self.trials,
            "failures": self.failures, "failure_rate": self.failure_rate,
            "failure_stderr": self.failure_stderr,
            "bound": f"{self.bound.numerator}/{self.bound.denominator}",
            "within_bound": self.within_bound,
            "wins": self.wins, "win_rate": self.win_rate, "win_stderr": self.win_stderr,
            "all_consistent": self.all_consistent,
        }


def _stderr(p: float, m: int) -> float:
    return math.sqrt(p * (1 - p) / m) if m else 0.0


def appc_trials(n: int, delta: int, policy: GoogolPolicy, trials: int,
                rng: np.random.Generator) -> TrialsReport:
    """Many seeded runs; level draws and the failure test are vectorised."""
    _check_args(n, delta)
    if delta**n >= kernels.INT64_SAFE:
        raise BadParam(f"Delta**n too large for the vectorised path: {delta}**{n}")
    r = np.column_stack([rng.integers(1, delta**lv, size=trials, endpoint=True, dtype=np.int64)
                         for lv in range(1, n + 1)])
    pis = rng.permuted(np.tile(np.arange(1, n + 1), (trials, 1)), axis=1)
    rhos = sample_levels(n, rng, trials)
    fail = kernels.appc_fail_mask(r)
    wins, ok = 0, True
    for t in np.flatnonzero(~fail):
        run = _play(tuple(pis[t].tolist()), tuple(rhos[t].tolist()), tuple(r[t].tolist()), delta, policy)
        wins += run.won
        ok = ok and run.consistent
    failures = int(fail.sum())
    fr = failures / trials
    wr = wins / trials
    return TrialsReport(n, delta, trials, failures, fr, _stderr(fr, trials), failure_bound(n, delta),
                        wins, wr, _stderr(wr, trials), ok)


@dataclass
class SimExactReport:
    n: int
    delta: int
    pairs: int
    failure_probability: Fraction
    bound: Fraction
    injective: bool
    in_support: bool
    consistent: bool
    probabilities_match: bool

    @property
    def passed(self) -> bool:
        return (self.injective and self.in_support and self.consistent and self.probabilities_match
                and self.failure_probability <= self.bound)

    def to_dict(self) -> dict:
        q = lambda x: f"{x.numerator}/{x.denominator}"  # noqa: E731
        return {
            "n": self.n, "delta": self.delta, "pairs": self.pairs,
            "failure_probability": q(self.failure_probability), "bound": q(self.bound),
            "injective": self.injective, "in_support": self.in_support,
            "consistent": self.consistent, "probabilities_match": self.probabilities_match,
            "passed": self.passed,
        }


def verify_sim_exact(n: int, delta: int) -> SimExactReport:
    """Enumerate every level draw for every ``(pi, rho)`` and check the splitting exactly.

    For fixed ``(pi, rho)`` each surviving draw must give a distinct final gap
    vector inside the level ranges of ``rho``, so each such vector has
    simulation probability ``prod_l Delta**-l``, the same as under the
    construction given ``rho``.
    """
    if n < 1 or delta < 2:
        raise BadParam(f"need n >= 1 and Delta >= 2, got n={n}, Delta={delta}")
    per_draw = math.prod(delta**lv for lv in range(1, n + 1))
    states = level_states(n)
    check_budget(math.factorial(n) * len(states) * per_draw, "exact splitting check")
    draws = list(itertools.product(*(range(1, delta**lv + 1) for lv in range(1, n + 1))))
    alive = [r for r in draws if not _failed(r)]
    fail_p = Fraction(len(draws) - len(alive), per_draw)
    injective = in_support = consistent = match = True
    pairs = 0
    for pi in itertools.permutations(range(1, n + 1)):
        for rho in states:
            pairs += 1
            images = Counter()
            for r in alive:
                steps = split_gaps(pi, rho, r)
                images[steps[-1][1]] += 1
                consistent = consistent and _consistent(steps, delta)
            injective = injective and all(c == 1 for c in images.values())
            in_support = in_support and all(
                all(1 <= x <= delta**lv for x, lv in zip(g, rho)) for g in images)
            # construction mass of a gap vector given rho: prod_i Delta**-rho_i
            target = Fraction(1, math.prod(delta**lv for lv in rho))
            match = match and all(Fraction(c, per_draw) == target for c in images.values())
    return SimExactReport(n, delta, pairs, fail_p, failure_bound(n, delta),
                          injective, in_support, consistent, match)


def make_googol_policy(name: str, n: int) -> GoogolPolicy:
    """``ordinal`` (optimal rank-only rule), ``never``, ``first``, or ``value:q`` (take a best-so-far value >= q*N)."""
    if name == "ordinal":
        t = ordinal_secretary_dp(n, max_n=max(n, 10)).threshold

        def ordinal(vals, N):
            k = len(vals)
            return k >= t and vals[-1] == max(vals)
        return ordinal
    if name == "never":
        return lambda vals, N: False
    if name == "first":
        return lambda vals, N: True
    kind, _, arg = name.partition(":")
    if kind == "value":
        try:
            q = Fraction(arg)
        except (ValueError, ZeroDivisionError) as exc:
            raise BadParam(f"bad threshold in {name!r}") from exc

        def by_value(vals, N):
            return vals[-1] == max(vals) and (vals[-1] >= q * N or len(vals) == n)
        return by_value
    raise BadParam(f"unknown googol policy {name!r}")
