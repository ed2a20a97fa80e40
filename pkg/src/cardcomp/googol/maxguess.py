"""The maximum guessing game: was the hidden element the largest?"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from ..distkit import FiniteDist, check_budget
from ..errors import BadParam, Overflow
from .instances import level_value_bound, sample_instance
from .levels import level_distribution

__all__ = [
    "LevelMaxGuessBayes",
    "always_no",
    "always_yes",
    "level_maxguess_bayes",
    "max_guess_eval",
]

MaxGuessPolicy = Callable[[tuple], object]  # -> "yes" / "no" or a FiniteDist over them


def always_yes(obs) -> str:
    return "yes"


def always_no(obs) -> str:
    return "no"


def max_guess_eval(F: FiniteDist, policy: MaxGuessPolicy) -> Fraction:
    """Exact expected reward with a uniformly deleted element; ``n`` for a right yes, ``n/(n-1)`` for a right no."""
    sizes = {len(S) for S in F}
    if len(sizes) != 1:
        raise BadParam(f"sets of mixed sizes {sorted(sizes)}")
    (n,) = sizes
    if n < 2:
        raise BadParam("maximum guessing needs n >= 2")
    check_budget(len(F) * n, "max-guess evaluation")
    r_yes, r_no = Fraction(n), Fraction(n, n - 1)
    total = Fraction(0)
    cache: dict = {}
    for S, w in F.items():
        for i in range(1, n + 1):
            obs = S[: i - 1] + S[i:]
            if obs not in cache:
                g = policy(obs)
                if isinstance(g, FiniteDist):
                    cache[obs] = (g.prob("yes"), g.prob("no"))
                elif g in ("yes", "no"):
                    cache[obs] = (Fraction(g == "yes"), Fraction(g == "no"))
                else:
                    raise BadParam(f"policy answered {g!r}, expected 'yes' or 'no'")
            py, pn = cache[obs]
            total += w * (py * r_yes if i == n else pn * r_no)
    return total / n


@dataclass
class LevelMaxGuessBayes:
    """Exact Bayes value of max-guessing on the level construction, with a lookup for its policy."""

    n: int
    delta: int
    value: Fraction
    keys: np.ndarray = None      # sorted observation codes
    say_yes: np.ndarray = None   # Bayes answer per code
    base: int = 0

    @property
    def advantage(self) -> Fraction:
        return self.value - 1

    def decide(self, obs) -> str:
        code = sum(int(v) * self.base**j for j, v in enumerate(obs))
        pos = int(np.searchsorted(self.keys, code))
        if pos < len(self.keys) and self.keys[pos] == code:
            return "yes" if self.say_yes[pos] else "no"
        return "no"

    def monte_carlo(self, rng: np.random.Generator, trials: int) -> tuple[float, float]:
        """Sampled reward of the Bayes answer on fresh instances: ``(mean, stderr)``."""
        n = self.n
        rewards = np.empty(trials)
        for t in range(trials):
            inst = sample_instance(n, self.delta, rng)
            i = int(rng.integers(1, n + 1))
            obs = inst.values[: i - 1] + inst.values[i:]
            guess = self.decide(obs)
            if i == n:
                rewards[t] = n if guess == "yes" else 0.0
            else:
                rewards[t] = n / (n - 1) if guess == "no" else 0.0
        return float(rewards.mean()), float(rewards.std(ddof=1) / math.sqrt(trials))


def level_maxguess_bayes(n: int, delta: int, limit: int | None = None) -> LevelMaxGuessBayes:
    """Enumerate every gap vector of every level permutation in integer arithmetic.

    Every level permutation has the same number ``Delta**(n(n+1)/2)`` of gap
    vectors, so the common factor drops out and only ``p_rho`` (scaled to
    integers) weights the rows.
    """
    if n < 2 or delta < 2:
        raise BadParam(f"need n >= 2 and Delta >= 2, got n={n}, Delta={delta}")
    F = level_distribution(n)
    grid = delta ** (n * (n + 1) // 2)
    check_budget(len(F) * grid * n, "level max-guess enumeration", limit)
    base = level_value_bound(n, delta) + 1
    if base ** (n - 1) >= 2**62:
        raise Overflow(f"observation codes for n={n}, Delta={delta} do not fit in int64")
    scale = math.lcm(*(w.denominator for w in F.weights))
    codes, yes_w, no_w = [], [], []
    powers = np.array([base**j for j in range(n - 1)], dtype=np.int64)
    for rho, p in F.items():
        w = int(p * scale)
        axes = [np.arange(1, delta**lv + 1, dtype=np.int64) for lv in rho]
        gaps = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        vals = np.cumsum(gaps, axis=1)
        for i in range(n):
            obs = np.delete(vals, i, axis=1)
            codes.append(obs @ powers)
            full = np.full(len(obs), w, dtype=np.int64)
            zero = np.zeros(len(obs), dtype=np.int64)
            yes_w.append(full if i == n - 1 else zero)
            no_w.append(zero if i == n - 1 else full)
    codes = np.concatenate(codes)
    keys, inv = np.unique(codes, return_inverse=True)
    Y = np.zeros(len(keys), dtype=np.int64)
    Nn = np.zeros(len(keys), dtype=np.int64)
    np.add.at(Y, inv, np.concatenate(yes_w))
    np.add.at(Nn, inv, np.concatenate(no_w))
    # reward n for yes, n/(n-1) for no; compare (n-1)*n*Y against n*No; ties answer "no"
    yes_score = (n - 1) * Y
    say_yes = yes_score > Nn
    best = int(np.where(say_yes, yes_score, Nn).sum(dtype=np.int64))
    total_w = n * grid * scale   # total row weight: n deletions per gap vector, sum_rho p_rho = 1
    value = Fraction(best * n, (n - 1) * total_w)
    return LevelMaxGuessBayes(n, delta, value, keys, say_yes, base)
