"""Order-statistics-indistinguishable (OSI) set distributions.

Sets are sorted tuples of positive integers.  Gap vectors are tuples
``(d_1, ..., d_n)`` with ``d_i = s_i - s_{i-1}`` and ``s_0 = 0``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .distkit import FiniteDist, budget, check_budget, product, pushforward, tv_distance, uniform, uniform_int
from .errors import BadParam, BudgetExceeded, IndexOutOfRange, SizeMismatch

__all__ = [
    "GeneralOsi",
    "IndexPath",
    "OsiParams",
    "OsiReport",
    "build_osi_general",
    "build_osi_pairs",
    "build_osi_triples",
    "deletion_marginal",
    "gaps_to_values",
    "index_path",
    "subset_marginal",
    "value_set",
    "values_to_gaps",
    "verify_osi",
]


# Value sets and gap vectors ----------------------------------------------

def value_set(values, N: int | None = None) -> tuple[int, ...]:
    """Validate and normalise a strictly increasing set of positive integers."""
    vals = tuple(int(v) for v in values)
    if vals and vals[0] < 1:
        raise BadParam(f"values must be positive, got {vals}")
    if any(a >= b for a, b in zip(vals, vals[1:])):
        raise BadParam(f"values must be strictly increasing, got {vals}")
    if N is not None and vals and vals[-1] > N:
        raise BadParam(f"value {vals[-1]} exceeds bound {N}")
    return vals


def values_to_gaps(values) -> tuple[int, ...]:
    vals = tuple(values)
    return tuple(b - a for a, b in zip((0,) + vals, vals))


def gaps_to_values(gaps) -> tuple[int, ...]:
    if any(d < 1 for d in gaps):
        raise BadParam(f"gaps must be >= 1, got {tuple(gaps)}")
    return tuple(itertools.accumulate(gaps))


# Warm-up constructions ---------------------------------------------------

def build_osi_pairs(N: int) -> FiniteDist:
    """Uniform over the consecutive pairs ``{i, i+1}`` inside ``[N]``."""
    if N < 2:
        raise BadParam(f"pairs need N >= 2, got {N}")
    return uniform((i, i + 1) for i in range(1, N))


def build_osi_triples(lmax: int, N: int) -> FiniteDist:
    """Uniform over ``{i, i + 2**l, i + 2**(l+1)}`` for ``1 <= l <= lmax`` inside ``[N]``."""
    if lmax < 1:
        raise BadParam(f"lmax must be >= 1, got {lmax}")
    sets = [
        (i, i + 2**l, i + 2 ** (l + 1))
        for l in range(1, lmax + 1)
        for i in range(1, N - 2 ** (l + 1) + 1)
    ]
    if not sets:
        raise BadParam(f"no triple fits in [{N}] for lmax={lmax}")
    return uniform(sets)


# General inductive construction -------------------------------------------

@dataclass(frozen=True)
class OsiParams:
    """Parameters of the inductive construction.

    ``d_1 ~ Uni[T1]``; for ``i >= 2``, ``d_i ~ Uni[floor(C**t_{i-1})]`` where
    ``t_1 < ... < t_{n-1}`` is drawn from the ``(n-1)``-element construction
    described by ``inner`` (defaulting to the same ``C`` and ``T1``).  For
    ``n = 2`` this is the consecutive-pairs distribution with ``N = T1 + 1``.
    """

    n: int
    C: Fraction = Fraction(2)
    T1: int = 4
    inner: OsiParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "C", Fraction(self.C))
        if self.n < 2:
            raise BadParam(f"n must be >= 2, got {self.n}")
        if self.C < 2:
            raise BadParam(f"C must be >= 2, got {self.C}")
        if self.T1 < 1:
            raise BadParam(f"T1 must be >= 1, got {self.T1}")
        if self.inner is not None and self.inner.n != self.n - 1:
            raise BadParam("inner parameters must describe n - 1 elements")

    def child(self) -> OsiParams:
        if self.inner is not None:
            return self.inner
        return OsiParams(self.n - 1, self.C, self.T1)


def _level_size(C: Fraction, t: int) -> int:
    """``floor(C**t)`` computed exactly."""
    p = C**t
    return p.numerator // p.denominator


def _uniform_big(rng: np.random.Generator, m: int) -> int:
    """Uniform integer in ``1..m`` for arbitrarily large ``m``."""
    if m < 2**62:
        return int(rng.integers(1, m + 1))
    bits = m.bit_length()
    while True:
        x = 0
        for _ in range(0, bits, 62):
            x = (x << 62) | int(rng.integers(0, 2**62))
        x &= (1 << bits) - 1
        if x < m:
            return x + 1


@dataclass
class GeneralOsi:
    """Result of :func:`build_osi_general`.

    ``dist`` is the exact law over gap vectors, or ``None`` in sampler mode.
    ``N`` is the realized maximum of ``s_n`` (exact when enumerated, otherwise
    an upper bound).
    """

    params: OsiParams
    N: int
    dist: FiniteDist | None
    _sampler: Callable[[np.random.Generator], tuple[int, ...]] = field(repr=False)

    @property
    def exact(self) -> bool:
        return self.dist is not None

    def sample(self, rng: np.random.Generator, size: int | None = None):
        if size is None:
            return self._sampler(rng)
        return [self._sampler(rng) for _ in range(size)]

    def value_dist(self) -> FiniteDist:
        if self.dist is None:
            raise BudgetExceeded("construction is in sampler mode")
        return pushforward(self.dist, gaps_to_values)


def _support_size(params: OsiParams, inner_dist: FiniteDist | None) -> int | None:
    if params.n == 2:
        return params.T1
    if inner_dist is None:
        return None
    total = 0
    for t in inner_dist:
        total += params.T1 * math.prod(_level_size(params.C, ti) for ti in gaps_to_values(t))
    return total


def build_osi_general(params: OsiParams, mode: str = "auto", limit: int | None = None) -> GeneralOsi:
    """Build the inductive construction, exactly if it fits the budget.

    ``mode`` is ``"auto"`` (exact when possible, sampler otherwise),
    ``"exact"`` (raise :class:`BudgetExceeded` if too large) or ``"sampler"``.
    """
    if mode not in ("auto", "exact", "sampler"):
        raise BadParam(f"unknown mode {mode!r}")
    limit = budget() if limit is None else limit

    if params.n == 2:
        def sample_pair(rng):
            return (_uniform_big(rng, params.T1), 1)
        dist = None
        if mode != "sampler":
            if params.T1 > limit:
                if mode == "exact":
                    check_budget(params.T1, "OSI construction", limit)
            else:
                dist = FiniteDist(
                    (((d, 1), Fraction(1, params.T1)) for d in range(1, params.T1 + 1)),
                    _trusted=True,
                )
        return GeneralOsi(params, params.T1 + 1, dist, sample_pair)

    inner = build_osi_general(params.child(), "exact" if mode == "exact" else mode, limit)
    C, T1 = params.C, params.T1

    def sample_gaps(rng):
        ts = gaps_to_values(inner.sample(rng))
        return (_uniform_big(rng, T1),) + tuple(_uniform_big(rng, _level_size(C, t)) for t in ts)

    # realized maximum of s_n
    if inner.dist is not None:
        N = T1 + max(sum(_level_size(C, t) for t in gaps_to_values(g)) for g in inner.dist)
    else:
        top = inner.N
        N = T1 + sum(_level_size(C, t) for t in range(top - (params.n - 2), top + 1))

    dist = None
    size = _support_size(params, inner.dist) if mode != "sampler" else None
    if size is not None:
        if size > limit:
            if mode == "exact":
                check_budget(size, "OSI construction", limit)
        else:
            acc: dict[tuple, Fraction] = {}
            first = uniform_int(1, T1)
            for tg, wt in inner.dist.items():
                ts = gaps_to_values(tg)
                parts = product([first] + [uniform_int(1, _level_size(C, t)) for t in ts], limit)
                for g, w in parts.items():
                    acc[g] = acc.get(g, Fraction(0)) + wt * w
            dist = FiniteDist(acc, _trusted=True)
    elif mode == "exact":
        raise BudgetExceeded("inner construction is not enumerable")
    return GeneralOsi(params, N, dist, sample_gaps)


# Marginals ------------------------------------------------------------------

def _set_size(F: FiniteDist) -> int:
    sizes = {len(s) for s in F}
    if len(sizes) != 1:
        raise BadParam(f"sets in the support have sizes {sorted(sizes)}")
    return sizes.pop()


def deletion_marginal(F: FiniteDist, i: int) -> FiniteDist:
    """Law of ``S_{-i}``: the set with its ``i``-th smallest element removed."""
    n = _set_size(F)
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"index {i} outside [1, {n}]")
    return pushforward(F, lambda s: s[: i - 1] + s[i:])


def subset_marginal(F: FiniteDist, I) -> FiniteDist:
    """Law of ``S_I``: the order statistics at the (1-based) ranks in ``I``."""
    n = _set_size(F)
    idx = sorted(set(I))
    if idx and (idx[0] < 1 or idx[-1] > n):
        raise IndexOutOfRange(f"index set {idx} not inside [1, {n}]")
    return pushforward(F, lambda s: tuple(s[k - 1] for k in idx))


# Index paths ---------------------------------------------------------------

@dataclass(frozen=True)
class IndexPath:
    """Two decrement paths from ``I`` and ``J`` that end at the same set."""

    i_path: tuple[tuple[int, ...], ...]
    j_path: tuple[tuple[int, ...], ...]

    @property
    def meet(self) -> tuple[int, ...]:
        return self.i_path[-1]

    @property
    def length(self) -> int:
        return len(self.i_path) + len(self.j_path) - 2


def index_path(I, J) -> IndexPath:
    """Repeatedly decrement the first differing element of the larger side."""
    cur_i, cur_j = tuple(sorted(set(I))), tuple(sorted(set(J)))
    if len(cur_i) != len(cur_j):
        raise SizeMismatch(f"|I| = {len(cur_i)} but |J| = {len(cur_j)}")
    ip, jp = [cur_i], [cur_j]
    while cur_i != cur_j:
        r = next(k for k, (a, b) in enumerate(zip(cur_i, cur_j)) if a != b)
        if cur_i[r] > cur_j[r]:
            cur_i = cur_i[:r] + (cur_i[r] - 1,) + cur_i[r + 1:]
            ip.append(cur_i)
        else:
            cur_j = cur_j[:r] + (cur_j[r] - 1,) + cur_j[r + 1:]
            jp.append(cur_j)
    return IndexPath(tuple(ip), tuple(jp))


# Verification ----------------------------------------------------------------

@dataclass
class OsiReport:
    n: int
    max_deletion_tv: Fraction
    deletion_argmax: tuple[int, int]
    max_subset_tv: Fraction
    subset_argmax: tuple[tuple[int, ...], tuple[int, ...]]
    subset_mode: str  # "all" or "sampled:<count>"
    amplification_ok: bool
    eps_target: Fraction | None
    boundary: bool = False  # single-set support, e.g. pairs with N = 2

    @property
    def passed(self) -> bool:
        ok = self.amplification_ok
        if self.eps_target is not None:
            ok = ok and self.max_subset_tv <= self.eps_target
        return ok

    def to_dict(self) -> dict:
        def q(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"
        return {
            "n": self.n,
            "max_deletion_tv": q(self.max_deletion_tv),
            "deletion_argmax": list(self.deletion_argmax),
            "max_subset_tv": q(self.max_subset_tv),
            "subset_argmax": [list(self.subset_argmax[0]), list(self.subset_argmax[1])],
            "subset_mode": self.subset_mode,
            "amplification_ok": self.amplification_ok,
            "eps_target": q(self.eps_target),
            "boundary": self.boundary,
            "passed": self.passed,
        }


def verify_osi(F: FiniteDist, eps_target=None, *, exhaustive_max_n: int = 12,
               samples: int = 2000, rng: np.random.Generator | None = None) -> OsiReport:
    """Exact deletion and subset TV maxima of ``F`` plus the path-amplification check.

    All ``(I, J)`` pairs are compared when ``n <= exhaustive_max_n``; otherwise
    ``samples`` random pairs are drawn from ``rng`` and the report says so.
    """
    n = _set_size(F)
    check_budget(len(F) * n, "verify_osi")
    dels = [deletion_marginal(F, i) for i in range(1, n + 1)]
    best_del, del_arg = Fraction(0), (1, 1)
    for i, j in itertools.combinations(range(n), 2):
        d = tv_distance(dels[i], dels[j])
        if d > best_del:
            best_del, del_arg = d, (i + 1, j + 1)

    pairs: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    if n <= exhaustive_max_n:
        mode = "all"
        for k in range(1, n):
            subsets = list(itertools.combinations(range(1, n + 1), k))
            pairs.extend(itertools.combinations(subsets, 2))
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        mode = f"sampled:{samples}"
        for _ in range(samples):
            k = int(rng.integers(1, n))
            I = tuple(sorted(int(x) + 1 for x in rng.choice(n, k, replace=False)))
            J = tuple(sorted(int(x) + 1 for x in rng.choice(n, k, replace=False)))
            pairs.append((I, J))
    check_budget(len(pairs) * len(F), "verify_osi subset pairs")

    cache: dict[tuple[int, ...], FiniteDist] = {}

    def marg(idx):
        if idx not in cache:
            cache[idx] = subset_marginal(F, idx)
        return cache[idx]

    best_sub, sub_arg = Fraction(0), ((), ())
    amp_ok = True
    for I, J in pairs:
        d = tv_distance(marg(I), marg(J))
        path = index_path(I, J)
        if d > path.length * best_del or path.length > n * n:
            amp_ok = False
        if d > best_sub:
            best_sub, sub_arg = d, (I, J)
    eps = None if eps_target is None else Fraction(eps_target)
    return OsiReport(n, best_del, del_arg, best_sub, sub_arg, mode, amp_ok, eps, boundary=len(F) == 1)
