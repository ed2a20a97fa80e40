"""Independent brute-force reference computations.

Nothing here imports the package under test: every function rebuilds its
answer from definitions with plain dicts, ``itertools`` and sympy, so the
frozen values in the test modules have a second source.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import sympy


def tv(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(Fraction(p.get(k, 0)) - Fraction(q.get(k, 0))) for k in keys), Fraction(0)) / 2


def uniform_dict(xs) -> dict:
    xs = list(xs)
    return {x: Fraction(1, len(xs)) for x in xs}


def convolve(p: dict, q: dict) -> dict:
    out: dict = {}
    for a, wa in p.items():
        for b, wb in q.items():
            out[a + b] = out.get(a + b, 0) + wa * wb
    return out


# Level chain ----------------------------------------------------------------

def level_chain(n: int):
    """States, transition rows and the sympy stationary vector, straight from the definition."""
    states = [(n,) + p for p in itertools.permutations(range(1, n))]

    def drop(rho, i):  # 1-based deletion on a full permutation
        if i == len(rho):
            return rho[:-1]
        merged = max(rho[i - 1], rho[i])
        return rho[: i - 1] + (merged,) + rho[i + 1:]

    M = sympy.zeros(len(states), len(states))
    for a, rho in enumerate(states):
        for b, target in enumerate(states):
            hits = sum(1 for i in range(1, n) if drop(rho, i) == target[:-1])
            M[a, b] = sympy.Rational(hits, n - 1)
    ns = (M.T - sympy.eye(len(states))).nullspace()
    assert len(ns) == 1
    v = ns[0] / sum(ns[0])
    return states, M, [Fraction(int(x.p), int(x.q)) for x in v]


def deletion_pushforward(dist: dict, idx) -> dict:
    """Uniform mixture of the merge-by-max deletions listed in ``idx`` (callable of length)."""
    out: dict = {}
    for lam, w in dist.items():
        ks = list(idx(len(lam)))
        for i in ks:
            new = lam[:-1] if i == len(lam) else lam[: i - 1] + (max(lam[i - 1], lam[i]),) + lam[i + 1:]
            out[new] = out.get(new, 0) + w / len(ks)
    return out


# Secretary ------------------------------------------------------------------

def threshold_rule_values(n: int) -> dict:
    """Win probability of "skip the first r-1, then take the first record", over all n! orders."""
    out = {}
    for r in range(1, n + 1):
        wins = 0
        for order in itertools.permutations(range(1, n + 1)):
            best = 0
            for k, x in enumerate(order, start=1):
                if k >= r and x > best:
                    wins += x == n
                    break
                best = max(best, x)
        out[r] = Fraction(wins, math.factorial(n))
    return out


# Gap splitting ----------------------------------------------------------------

def splitting_failure(n: int, delta: int) -> Fraction:
    """P[some r_l <= r_1 + ... + r_{l-1}] with r_l ~ Uni[delta**l]."""
    ranges = [range(1, delta**lv + 1) for lv in range(1, n + 1)]
    bad = 0
    total = 0
    for r in itertools.product(*ranges):
        total += 1
        acc = 0
        for x in r:
            if x <= acc:
                bad += 1
                break
            acc += x
    return Fraction(bad, total)


# Single-shot guessing -----------------------------------------------------------

def die_guess_bayes(sets: list[tuple], weights: list[Fraction]) -> Fraction:
    """Optimal uniform-deletion die guessing value, reward n for naming the deleted rank."""
    n = len(sets[0])
    post: dict = {}
    for S, w in zip(sets, weights):
        for i in range(n):
            obs = S[:i] + S[i + 1:]
            post.setdefault(obs, [Fraction(0)] * n)[i] += w / n
    return sum((max(v) * n for v in post.values()), Fraction(0))


# Rank guessing closed forms -------------------------------------------------------

def warmup2_closed_form(s1: int, s2: int, N: int) -> Fraction:
    return 1 + Fraction(s2 - s1 - 2, N)


def exp_gaps_trace(level_const: int, gaps: list[int]) -> set:
    """Index set chosen by the exponential-gaps rule, written from the rule statement."""
    n = len(gaps) + 2
    inc = all(a < b for a, b in zip(gaps, gaps[1:]))
    dec = all(a > b for a, b in zip(gaps, gaps[1:]))
    if dec and not inc:
        I = {1, n - 1, n}
        for i in range(3, n):
            # mirrored: compare from the right end
            a, b = gaps[n - i], gaps[n - i - 1]
            if b >= level_const * a + 2 * level_const + 2:
                I.add(n + 1 - i)
        return I
    I = {1, 2, n}
    if inc:
        for i in range(3, n):
            if gaps[i - 2] >= level_const * gaps[i - 3] + 2 * level_const + 2:
                I.add(i)
    return I
