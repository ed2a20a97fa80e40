"""Level permutations, the deletion operators and the level Markov chain.

A level permutation ``rho`` lists the level of each gap ``d_1..d_n`` with
``rho_1 = n``.  Deleting element ``i < k`` merges gaps ``i`` and ``i + 1``
into one gap at level ``max``; deleting the last element drops its gap.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from ..distkit import FiniteDist, check_budget, mixture, point
from ..errors import BadLength, BadParam, BudgetExceeded, IndexOutOfRange, NonUniqueStationary
from ..linalg import nullspace

__all__ = [
    "CHAIN_MAX_N",
    "DeletionIdentityReport",
    "LevelChain",
    "build_transition_matrix",
    "check_level_perm",
    "check_partial_levels",
    "delete_level",
    "level_distribution",
    "level_states",
    "stationary_distribution",
    "uniform_delete",
    "verify_deletion_identities",
]

CHAIN_MAX_N = 8


def check_level_perm(rho: Sequence[int]) -> tuple[int, ...]:
    rho = tuple(int(x) for x in rho)
    n = len(rho)
    if sorted(rho) != list(range(1, n + 1)):
        raise BadParam(f"{rho} is not a permutation of 1..{n}")
    if n and rho[0] != n:
        raise BadParam(f"first level must be {n}, got {rho[0]}")
    return rho


def check_partial_levels(lam: Sequence[int]) -> tuple[int, ...]:
    """Distinct positive levels with the first one the largest."""
    lam = tuple(int(x) for x in lam)
    if len(set(lam)) != len(lam) or any(x < 1 for x in lam):
        raise BadParam(f"{lam} must hold distinct positive levels")
    if lam and lam[0] != max(lam):
        raise BadParam(f"first entry of {lam} must be the largest")
    return lam


def delete_level(lam: Sequence[int], i: int) -> tuple[int, ...]:
    """``D_i``: merge entries ``i`` and ``i + 1`` by max, or drop the last entry when ``i = k``."""
    lam = tuple(lam)
    k = len(lam)
    if not 1 <= i <= k:
        raise IndexOutOfRange(f"deletion index {i} outside 1..{k}")
    if i == k:
        return lam[:-1]
    return lam[: i - 1] + (max(lam[i - 1], lam[i]),) + lam[i + 1:]


def level_states(n: int) -> tuple[tuple[int, ...], ...]:
    """All level permutations of size ``n`` in lexicographic order."""
    if n < 1:
        raise BadParam(f"need n >= 1, got {n}")
    return tuple((n,) + p for p in itertools.permutations(range(1, n)))


@dataclass
class LevelChain:
    n: int
    states: tuple[tuple[int, ...], ...]
    matrix: list[list[Fraction]]
    stationary: tuple[Fraction, ...] | None = None
    index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.index = {s: j for j, s in enumerate(self.states)}

    def row(self, rho: Sequence[int]) -> list[Fraction]:
        return self.matrix[self.index[tuple(rho)]]

    def to_dict(self) -> dict:
        q = lambda x: f"{x.numerator}/{x.denominator}"  # noqa: E731
        out = {
            "n": self.n,
            "states": ["".join(map(str, s)) for s in self.states],
            "matrix": [[q(x) for x in r] for r in self.matrix],
        }
        if self.stationary is not None:
            out["stationary"] = [q(x) for x in self.stationary]
        return out


def build_transition_matrix(n: int, max_n: int = CHAIN_MAX_N) -> LevelChain:
    """``M(rho, rho') = #{i < n : D_i(rho) = D_n(rho')} / (n - 1)``."""
    if n < 3:
        raise BadParam(f"the level chain needs n >= 3, got {n}")
    if n > max_n:
        raise BudgetExceeded(f"n={n} exceeds the chain cap {max_n} ({math.factorial(n - 1)} states)")
    states = level_states(n)
    by_prefix = {s[:-1]: j for j, s in enumerate(states)}
    w = Fraction(1, n - 1)
    matrix = []
    for rho in states:
        row = [Fraction(0)] * len(states)
        for i in range(1, n):
            row[by_prefix[delete_level(rho, i)]] += w
        matrix.append(row)
    return LevelChain(n, states, matrix)


def stationary_distribution(chain: LevelChain) -> tuple[Fraction, ...]:
    """The unique ``p`` with ``p M = p`` and ``sum(p) = 1``, by exact elimination."""
    m = len(chain.states)
    # column j of (M^T - I) x = 0
    rows = []
    for j in range(m):
        r = {i: chain.matrix[i][j] for i in range(m) if chain.matrix[i][j]}
        r[j] = r.get(j, Fraction(0)) - 1
        rows.append({c: v for c, v in r.items() if v})
    basis = nullspace(rows, m)
    if len(basis) != 1:
        raise NonUniqueStationary(f"stationary space has dimension {len(basis)} for n={chain.n}")
    v = basis[0]
    total = sum(v, Fraction(0))
    p = tuple(x / total for x in v)
    if any(x <= 0 for x in p):
        raise NonUniqueStationary(f"stationary vector for n={chain.n} is not strictly positive")
    for j in range(m):
        if sum((p[i] * chain.matrix[i][j] for i in range(m)), Fraction(0)) != p[j]:
            raise NonUniqueStationary("p M = p failed after solving")  # pragma: no cover
    chain.stationary = p
    return p


@lru_cache(maxsize=None)
def _cached_chain(n: int) -> LevelChain:
    chain = build_transition_matrix(n)
    stationary_distribution(chain)
    return chain


def level_distribution(n: int) -> FiniteDist:
    """``F^lev``: the stationary law over level permutations (point mass for ``n <= 2``)."""
    if n <= 2:
        return point(tuple(range(n, 0, -1)))
    chain = _cached_chain(n)
    return FiniteDist(dict(zip(chain.states, chain.stationary)))


def uniform_delete(dist: FiniteDist, mode: str) -> FiniteDist:
    """Push ``dist`` through ``U`` (uniform over ``D_1..D_k``) or ``V`` (uniform over ``D_1..D_{k-1}``)."""
    lengths = {len(x) for x in dist}
    if len(lengths) != 1:
        raise BadLength(f"support mixes lengths {sorted(lengths)}")
    (k,) = lengths
    if mode == "U":
        idx = range(1, k + 1)
    elif mode == "V":
        idx = range(1, k)
    else:
        raise BadParam(f"mode must be 'U' or 'V', got {mode!r}")
    if len(idx) == 0:
        raise BadLength(f"{mode} needs longer entries, got length {k}")
    w = Fraction(1, len(idx))
    return mixture((w, dist.map(lambda lam, i=i: delete_level(lam, i))) for i in idx)


def _apply(dist: FiniteDist, mode: str, times: int) -> FiniteDist:
    for _ in range(times):
        dist = uniform_delete(dist, mode)
    return dist


@dataclass
class DeletionIdentityReport:
    n: int
    per_k: list[dict]   # {"k", "u_eq_d", "d_eq_v"}

    @property
    def passed(self) -> bool:
        return all(r["u_eq_d"] and r["d_eq_v"] for r in self.per_k)

    def to_dict(self) -> dict:
        return {"n": self.n, "passed": self.passed, "per_k": self.per_k}


def verify_deletion_identities(n: int, max_n: int = 6) -> DeletionIdentityReport:
    """Check ``U^k F = D_{n-k+1}(V^{k-1} F) = V^k F`` exactly for ``k = 1..n-1``."""
    if n > max_n:
        raise BudgetExceeded(f"n={n} exceeds the identity-check cap {max_n}")
    F = level_distribution(n)
    check_budget(len(F) * n * n, "deletion identities")
    per_k = []
    u, v_prev = F, F
    for k in range(1, n):
        u = uniform_delete(u, "U")
        v = uniform_delete(v_prev, "V")
        d = v_prev.map(lambda lam, j=n - k + 1: delete_level(lam, j))
        per_k.append({"k": k, "u_eq_d": u == d, "d_eq_v": d == v})
        v_prev = v
    return DeletionIdentityReport(n, per_k)
