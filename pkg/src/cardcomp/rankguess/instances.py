"""Instance generators and the gap-shape predicates used by the guessing bounds.

Gap vectors here are ``d_i = s_{i+1} - s_i`` for ``i = 1..n-1`` (no
leading ``s_1`` term), matching how the guessing algorithms read their input.
"""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import BadLevel, BadParam
from .policies import EXP_LEVELS

__all__ = [
    "diffs",
    "fibonacci_violated",
    "is_strictly_monotone",
    "level_condition",
    "level_instance",
    "random_instance",
]


def diffs(values) -> list[int]:
    return [b - a for a, b in zip(values, values[1:])]


def is_strictly_monotone(d) -> str | None:
    """``"inc"``, ``"dec"`` or ``None``."""
    if all(a < b for a, b in zip(d, d[1:])):
        return "inc"
    if all(a > b for a, b in zip(d, d[1:])):
        return "dec"
    return None


def fibonacci_violated(d) -> bool:
    """Monotone ``d`` with some triple breaking the Fibonacci-like inequality."""
    shape = is_strictly_monotone(d)
    if shape == "inc":
        return any(d[i] + d[i + 1] > d[i + 2] + 8 for i in range(len(d) - 2))
    if shape == "dec":
        return any(d[i] + 8 < d[i + 1] + d[i + 2] for i in range(len(d) - 2))
    return False


def level_condition(d, level: int) -> bool:
    """Level-``level`` condition for a strictly monotone gap vector.

    Level 0 is the Fibonacci-like condition; level ``l >= 1`` asks every
    consecutive ratio (in the monotone direction) to be at least ``L_l``.
    """
    shape = is_strictly_monotone(d)
    if shape is None:
        return False
    if level == 0:
        return not fibonacci_violated(d)
    if level not in range(1, 7):
        raise BadLevel(f"level must be in 0..6, got {level}")
    L = EXP_LEVELS[level - 1]
    seq = d if shape == "inc" else d[::-1]
    return all(b >= L * a for a, b in zip(seq, seq[1:]))


def _to_values(d, start: int) -> tuple[int, ...]:
    return tuple(itertools.accumulate([start] + list(d)))


def random_instance(n: int, rng: np.random.Generator, vmax: int = 10**6,
                    min_gap: int = 20) -> tuple[tuple[int, ...], int]:
    """Uniformly random ``n``-set in ``[1, vmax]`` with consecutive gaps ``>= min_gap``.

    Returns ``(values, N)`` with ``N = vmax``.
    """
    room = vmax - (min_gap - 1) * (n - 1)
    if room < n:
        raise BadParam(f"cannot fit {n} values with gap {min_gap} below {vmax}")
    base = np.sort(rng.choice(room, size=n, replace=False)) + 1
    vals = tuple(int(b) + (min_gap - 1) * k for k, b in enumerate(base))
    return vals, vmax


def level_instance(n: int, level: int, rng: np.random.Generator, *, satisfy: bool = False,
                   decreasing: bool = False) -> tuple[tuple[int, ...], int]:
    """Gap vector meeting the level-``(level-1)`` condition and breaking level ``level``.

    With ``satisfy=True`` the vector meets the level-``level`` condition
    instead.  Level 0 (``level=1`` and ``satisfy=False``) is built as a
    near-Fibonacci sequence.  Returns ``(values, N)`` with a little headroom
    above ``s_n``.
    """
    if level not in range(1, 7):
        raise BadLevel(f"level must be in 1..6, got {level}")
    m = n - 1
    if m < 2:
        raise BadParam("need n >= 3")
    lo = EXP_LEVELS[level - 1] if satisfy else (EXP_LEVELS[level - 2] if level >= 2 else None)
    hi = EXP_LEVELS[level - 1]
    d = [int(rng.integers(20, 100))]
    if lo is None:
        # level-0 condition holds, level 1 (ratio >= 2) fails at the first step
        d.append(int(rng.integers(d[0] + 1, 2 * d[0])))
        for _ in range(m - 2):
            d.append(d[-1] + d[-2] - 8 + int(rng.integers(0, 40)))
    else:
        # ratios are drawn on a 1/1024 grid so huge gaps stay exact Python ints
        bad = None if satisfy else int(rng.integers(0, m - 1))
        for k in range(m - 1):
            prev = d[-1]
            u = int(rng.integers(0, 1024))
            if k == bad:
                nxt = lo * prev + ((hi - lo) * prev * u) // 1024
            else:
                nxt = lo * prev + ((lo + 1) * prev * u) // 1024
            d.append(max(nxt, prev + 1))
    if decreasing:
        d = d[::-1]
    start = int(rng.integers(1, 100))
    vals = _to_values(d, start)
    return vals, vals[-1] + int(rng.integers(1, 100))
