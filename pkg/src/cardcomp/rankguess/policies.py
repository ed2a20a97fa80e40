"""Guessing policies for the (perturbed) rank guessing game.

A policy maps the sorted observed values ``s~_1 < ... < s~_{n-1}`` and the
bound ``N`` to a :class:`FiniteDist` over guesses ``1..n``.  Gaps are
``g_j = s~_{j+1} - s~_j`` for ``j = 1..n-2``.
"""
from __future__ import annotations

import math
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from ..distkit import FiniteDist, mixture, uniform
from ..errors import BadLevel, BadParam, TooFewFaces

__all__ = [
    "EXP_LEVELS",
    "ConstantPolicy",
    "DieGuessPolicy",
    "RecursiveGuessPolicy",
    "ExpGapsPolicy",
    "FaceReductionPolicy",
    "GuessPolicy",
    "MonoGapsPolicy",
    "RandomPolicy",
    "Warmup2Policy",
    "Warmup3Policy",
    "die_guess_policy",
    "exp_gaps",
    "exp_gaps_set",
    "face_reduction",
    "guess_recursive",
    "make_policy",
    "mono_gaps",
    "warmup2",
    "warmup3",
]

EXP_LEVELS = (2, 4, 16, 225, 42374, 2**21)


def _gaps(obs: Sequence[int]) -> list[int]:
    return [b - a for a, b in zip(obs, obs[1:])]


def _check_observed(obs: Sequence[int], N: int, lo: int = 1) -> tuple[int, ...]:
    obs = tuple(int(x) for x in obs)
    if any(a >= b for a, b in zip(obs, obs[1:])):
        raise BadParam(f"observed values must be strictly increasing, got {obs}")
    if obs and (obs[0] < lo or obs[-1] > N):
        raise BadParam(f"observed values {obs} outside [{lo}, {N}]")
    return obs


def _strictly_increasing(xs) -> bool:
    return all(a < b for a, b in zip(xs, xs[1:]))


def _strictly_decreasing(xs) -> bool:
    return all(a > b for a, b in zip(xs, xs[1:]))


# Warm-ups ------------------------------------------------------------------

def warmup2(s: int, N: int) -> FiniteDist:
    """Guess 1 with probability ``s / N``."""
    if not 1 <= s <= N:
        raise BadParam(f"need 1 <= s <= N, got s={s}, N={N}")
    p = Fraction(s, N)
    return FiniteDist({1: p, 2: 1 - p}, _trusted=True)


def _log_ratio(a: int, b: int) -> Fraction:
    """``log2(a) / log2(b)`` as a Fraction; exact when both are powers of two."""
    if a & (a - 1) == 0 and b & (b - 1) == 0:
        return Fraction(a.bit_length() - 1, b.bit_length() - 1)
    return Fraction(math.log2(a) / math.log2(b))


def warmup3(obs: Sequence[int], N: int, *, _lo: int = 1) -> FiniteDist:
    """Guess 2 with probability ``clamp(log2(s~_2 - s~_1) / log2 N)``, else 1 or 3 evenly."""
    s1, s2 = _check_observed(obs, N, _lo)
    gap = s2 - s1
    if gap == 1:
        p = Fraction(0)
    elif N < 2:
        raise BadParam(f"warmup3 needs N >= 2, got {N}")
    else:
        p = min(Fraction(1), max(Fraction(0), _log_ratio(gap, N)))
    side = (1 - p) / 2
    return FiniteDist({1: side, 2: p, 3: side}, _trusted=True)


# Mono-Gaps and Exp-Gaps ------------------------------------------------------

def mono_gaps(obs: Sequence[int]) -> FiniteDist:
    """Pick adjacent gaps ``(g_i, g_{i+1})`` uniformly and guess around the larger one."""
    n = len(obs) + 1
    if n < 4:
        raise TooFewFaces(f"Mono-Gaps needs n >= 4, got {n}")
    g = _gaps(obs)
    acc: dict[int, Fraction] = {}
    w = Fraction(1, n - 3)
    third = w / 3
    for i in range(1, n - 2):
        a, b = g[i - 1], g[i]
        if a + 4 < b:
            moves = ((i + 2, 2 * third), (i, third))
        elif a > b + 4:
            moves = ((i + 1, 2 * third), (i + 3, third))
        else:
            moves = ((i, w / 2), (i + 3, w / 2))
        for j, p in moves:
            acc[j] = acc.get(j, Fraction(0)) + p
    return FiniteDist(acc, _trusted=True)


def exp_gaps_set(level: int, obs: Sequence[int]) -> tuple[int, ...]:
    """The candidate set ``I`` that Exp-Gaps guesses from uniformly."""
    if level not in range(1, 7):
        raise BadLevel(f"level must be in 1..6, got {level}")
    n = len(obs) + 1
    if n < 3:
        raise TooFewFaces(f"Exp-Gaps needs n >= 3, got {n}")
    L = EXP_LEVELS[level - 1]
    g = [None] + _gaps(obs)  # 1-based
    if _strictly_increasing(g[1:]):
        I = {1, 2, n}
        I.update(i for i in range(3, n) if g[i - 1] >= L * g[i - 2] + 2 * L + 2)
    elif _strictly_decreasing(g[1:]):
        I = {1, n - 1, n}
        I.update(i for i in range(2, n - 1) if g[i - 1] >= L * g[i] + 2 * L + 2)
    else:
        I = {1, 2, n}
    return tuple(sorted(I))


def exp_gaps(level: int, obs: Sequence[int]) -> FiniteDist:
    return uniform(exp_gaps_set(level, obs))


# Recursive Guess -------------------------------------------------------------

def _floor_log2(x: int) -> int:
    return x.bit_length() - 1


def _guess(obs: tuple[int, ...], B: int) -> FiniteDist:
    n = len(obs) + 1
    if n == 3:
        return warmup3(obs, B, _lo=0)
    big = 6 * n
    parts = [(1 - Fraction(1, big), mono_gaps(obs))]
    for level in range(1, 7):
        parts.append((Fraction(1, big**level) - Fraction(1, big ** (level + 1)), exp_gaps(level, obs)))
    g = _gaps(obs)
    t = tuple(_floor_log2(x) for x in g)
    Bn = _floor_log2(B)
    if _strictly_increasing(t):
        sub = _guess(t, Bn).map(lambda j: j + 1)
    elif _strictly_decreasing(t):
        sub = _guess(t[::-1], Bn).map(lambda j: n - j)
    else:
        sub = uniform(range(1, n + 1))
    parts.append((Fraction(1, big**7), sub))
    return mixture(parts)


def guess_recursive(obs: Sequence[int], B: int) -> FiniteDist:
    """The recursive Guess mixture; the bound ``B`` becomes ``floor(log2 B)`` per level."""
    obs = tuple(int(x) for x in obs)
    n = len(obs) + 1
    if n < 3:
        raise TooFewFaces(f"Guess needs n >= 3, got {n}")
    if obs and obs[-1] > B:
        raise BadParam(f"bound {B} below observed maximum {obs[-1]}")
    _check_observed(obs, B)
    return _guess(obs, B)


def die_guess_policy(obs: Sequence[int], N: int) -> FiniteDist:
    """Scale observations by 20 (bound ``20 N``) and run Guess, or warmup2 for ``n = 2``."""
    obs = _check_observed(obs, N)
    scaled = tuple(20 * x for x in obs)
    if len(obs) == 1:
        return warmup2(scaled[0], 20 * N)
    return guess_recursive(scaled, 20 * N)


def face_reduction(c: int, obs: Sequence[int], N: int) -> FiniteDist:
    """Play the ``c``-face game on the top ``c - 1`` observations and map back to ``n`` ranks.

    A ``c``-face guess of 1 ("smallest") spreads evenly over ranks
    ``1..n-c+1``; a guess ``j >= 2`` becomes rank ``j + n - c``.
    """
    obs = _check_observed(obs, N)
    n = len(obs) + 1
    if not 3 <= c <= n:
        raise BadParam(f"need 3 <= c <= n, got c={c}, n={n}")
    inner = die_guess_policy(obs[n - c:], N)
    acc: dict[int, Fraction] = {}
    low = n - c + 1
    for j, w in inner.items():
        if j == 1:
            for r in range(1, low + 1):
                acc[r] = acc.get(r, Fraction(0)) + w / low
        else:
            acc[j + n - c] = acc.get(j + n - c, Fraction(0)) + w
    return FiniteDist(acc, _trusted=True)


# Policy objects --------------------------------------------------------------

class GuessPolicy:
    """Callable ``policy(observed, N) -> FiniteDist``; subclasses may expose a fast kernel."""

    name = "policy"
    value_oblivious = False
    kernel: tuple | None = None

    def __call__(self, obs: Sequence[int], N: int) -> FiniteDist:  # pragma: no cover - abstract
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{self.name}>"


@lru_cache(maxsize=None)
def _uniform_faces(n: int) -> FiniteDist:
    return uniform(range(1, n + 1))


class RandomPolicy(GuessPolicy):
    name = "random"
    value_oblivious = True

    def __call__(self, obs, N):
        return _uniform_faces(len(obs) + 1)


class ConstantPolicy(GuessPolicy):
    """Always the same distribution over ``1..n``, whatever the observation."""

    value_oblivious = True

    def __init__(self, dist: FiniteDist):
        self.dist = dist
        self.name = f"constant{dict((k, str(v)) for k, v in dist.items())}"

    def __call__(self, obs, N):
        return self.dist


class Warmup2Policy(GuessPolicy):
    name = "warmup2"

    def __call__(self, obs, N):
        (s,) = obs
        return warmup2(s, N)


class Warmup3Policy(GuessPolicy):
    name = "warmup3"

    def __call__(self, obs, N):
        return warmup3(obs, N)


class MonoGapsPolicy(GuessPolicy):
    name = "mono"
    kernel = ("mono",)

    def __call__(self, obs, N):
        return mono_gaps(obs)


class ExpGapsPolicy(GuessPolicy):
    def __init__(self, level: int):
        if level not in range(1, 7):
            raise BadLevel(f"level must be in 1..6, got {level}")
        self.level = level
        self.name = f"exp:{level}"
        self.kernel = ("exp", level)

    def __call__(self, obs, N):
        return exp_gaps(self.level, obs)


class RecursiveGuessPolicy(GuessPolicy):
    name = "guess"

    def __call__(self, obs, N):
        return guess_recursive(obs, N)


class DieGuessPolicy(GuessPolicy):
    name = "die"

    def __call__(self, obs, N):
        return die_guess_policy(obs, N)


class FaceReductionPolicy(GuessPolicy):
    def __init__(self, c: int):
        self.c = c
        self.name = f"face:{c}"

    def __call__(self, obs, N):
        return face_reduction(self.c, obs, N)


def make_policy(name: str) -> GuessPolicy:
    """Policy from a CLI-style name: warmup2, warmup3, mono, exp:L, guess, die, face:c, random."""
    simple = {
        "random": RandomPolicy,
        "warmup2": Warmup2Policy,
        "warmup3": Warmup3Policy,
        "mono": MonoGapsPolicy,
        "guess": RecursiveGuessPolicy,
        "die": DieGuessPolicy,
    }
    if name in simple:
        return simple[name]()
    kind, _, arg = name.partition(":")
    if kind == "exp" and arg.isdigit():
        return ExpGapsPolicy(int(arg))
    if kind == "face" and arg.isdigit():
        return FaceReductionPolicy(int(arg))
    raise BadParam(f"unknown policy {name!r}")
