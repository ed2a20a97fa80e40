"""Exact finite distributions with rational weights, and total variation tools.

A :class:`FiniteDist` maps hashable outcomes to :class:`fractions.Fraction`
weights that sum to exactly one.  Everything that checks an equality or an
inequality from the theory goes through this type; floats only show up in
the Monte-Carlo helpers at the bottom of the module.
"""
from __future__ import annotations

import itertools
import json
import math
import os
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import BudgetExceeded, EmptyRange, ZeroMass

__all__ = [
    "FiniteDist",
    "budget",
    "check_budget",
    "condition",
    "empirical_tv",
    "mixture",
    "point",
    "product",
    "pushforward",
    "tv_distance",
    "uniform",
    "uniform_int",
    "uniform_shift_bound",
]

DEFAULT_BUDGET = 10**7


def budget() -> int:
    """Enumeration budget, overridable through ``CARDCOMP_BUDGET``."""
    raw = os.environ.get("CARDCOMP_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def check_budget(size: int, what: str = "enumeration", limit: int | None = None) -> None:
    limit = budget() if limit is None else limit
    if size > limit:
        raise BudgetExceeded(
            f"{what} needs {size} outcomes, budget is {limit} "
            "(raise CARDCOMP_BUDGET or use the sampling path)"
        )


def _sort_key(outcome: Any) -> tuple:
    # Natural order inside a type, type name across types; keeps mixed
    # supports (e.g. tuples plus a failure marker) deterministic.
    return (type(outcome).__name__, outcome)


def _canonical_order(outcomes: Iterable[Hashable]) -> list:
    items = list(outcomes)
    try:
        return sorted(items, key=_sort_key)
    except TypeError:
        return sorted(items, key=repr)


class FiniteDist(Mapping):
    """Immutable probability mass function with exact rational weights.

    Zero-weight outcomes are dropped on construction, so ``support`` is the
    set of outcomes with positive mass.  Iteration follows a canonical order,
    which makes equality, hashing and JSON output deterministic.
    """

    __slots__ = ("_w", "_order", "_hash")

    def __init__(self, weights: Mapping[Hashable, Any] | Iterable[tuple[Hashable, Any]],
                 *, _trusted: bool = False):
        items = weights.items() if isinstance(weights, Mapping) else weights
        w: dict[Hashable, Fraction] = {}
        for outcome, weight in items:
            weight = Fraction(weight)
            if weight < 0:
                raise ValueError(f"negative weight {weight} on {outcome!r}")
            if weight:
                w[outcome] = w.get(outcome, Fraction(0)) + weight
        if not _trusted:
            total = sum(w.values(), Fraction(0))
            if total != 1:
                raise ValueError(f"weights sum to {total}, not 1")
        self._order = tuple(_canonical_order(w))
        self._w = w
        self._hash = None

    # Mapping protocol ---------------------------------------------------
    def __getitem__(self, outcome: Hashable) -> Fraction:
        return self._w[outcome]

    def __iter__(self) -> Iterator:
        return iter(self._order)

    def __len__(self) -> int:
        return len(self._w)

    def prob(self, outcome: Hashable) -> Fraction:
        return self._w.get(outcome, Fraction(0))

    @property
    def support(self) -> tuple:
        return self._order

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(self._w[o] for o in self._order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteDist):
            return NotImplemented
        return self._w == other._w

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._w.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{o!r}: {w}" for o, w in list(self.items())[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"FiniteDist({{{body}{more}}})"

    # Convenience ----------------------------------------------------------
    def expectation(self, f: Callable[[Any], Any]) -> Fraction:
        return sum((w * Fraction(f(o)) for o, w in self._w.items()), Fraction(0))

    def total(self, pred: Callable[[Any], bool]) -> Fraction:
        return sum((w for o, w in self._w.items() if pred(o)), Fraction(0))

    def map(self, f: Callable[[Any], Hashable]) -> FiniteDist:
        return pushforward(self, f)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw outcomes with ``rng``; weights are cast to float only here."""
        probs = np.array([float(w) for w in self.weights])
        probs /= probs.sum()
        idx = rng.choice(len(self._order), size=size, p=probs)
        if size is None:
            return self._order[int(idx)]
        return [self._order[int(i)] for i in idx]

    # Serialization ----------------------------------------------------------
    def to_json_obj(self) -> dict:
        return {
            "support": [_jsonable(o) for o in self._order],
            "weights": [f"{w.numerator}/{w.denominator}" for w in self.weights],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str | Mapping) -> FiniteDist:
        obj = json.loads(text) if isinstance(text, str) else text
        support = [_hashable(o) for o in obj["support"]]
        return cls(zip(support, (Fraction(w) for w in obj["weights"])))


def _jsonable(o: Any) -> Any:
    if isinstance(o, tuple):
        return [_jsonable(x) for x in o]
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    return o


def _hashable(o: Any) -> Any:
    if isinstance(o, list):
        return tuple(_hashable(x) for x in o)
    return o


# Constructors -------------------------------------------------------------

def point(outcome: Hashable) -> FiniteDist:
    return FiniteDist({outcome: 1}, _trusted=True)


def uniform(outcomes: Iterable[Hashable]) -> FiniteDist:
    outs = list(dict.fromkeys(outcomes))
    if not outs:
        raise EmptyRange("uniform distribution over an empty set")
    w = Fraction(1, len(outs))
    return FiniteDist(((o, w) for o in outs), _trusted=True)


def uniform_int(lo: int, hi: int) -> FiniteDist:
    """Uniform over the integers ``lo..hi`` inclusive."""
    if lo > hi:
        raise EmptyRange(f"empty integer range [{lo}, {hi}]")
    return uniform(range(lo, hi + 1))


def mixture(components: Iterable[tuple[Any, FiniteDist]]) -> FiniteDist:
    """Convex combination ``sum_j c_j * dist_j``; coefficients must sum to 1."""
    acc: dict[Hashable, Fraction] = {}
    total = Fraction(0)
    for coef, dist in components:
        coef = Fraction(coef)
        total += coef
        if not coef:
            continue
        for o, w in dist.items():
            acc[o] = acc.get(o, Fraction(0)) + coef * w
    if total != 1:
        raise ValueError(f"mixture coefficients sum to {total}")
    return FiniteDist(acc, _trusted=True)


# Operations ---------------------------------------------------------------

def tv_distance(p: FiniteDist, q: FiniteDist) -> Fraction:
    """Half the L1 distance between two pmfs over the union of supports."""
    s = Fraction(0)
    for o, w in p.items():
        s += abs(w - q.prob(o))
    for o, w in q.items():
        if o not in p:
            s += w
    return s / 2


def pushforward(p: FiniteDist, f: Callable[[Any], Hashable]) -> FiniteDist:
    acc: dict[Hashable, Fraction] = {}
    for o, w in p.items():
        y = f(o)
        acc[y] = acc.get(y, Fraction(0)) + w
    return FiniteDist(acc, _trusted=True)


def condition(p: FiniteDist, pred: Callable[[Any], bool]) -> FiniteDist:
    kept = {o: w for o, w in p.items() if pred(o)}
    mass = sum(kept.values(), Fraction(0))
    if not mass:
        raise ZeroMass("conditioning event has zero probability")
    return FiniteDist({o: w / mass for o, w in kept.items()}, _trusted=True)


def product(ps: Iterable[FiniteDist], limit: int | None = None) -> FiniteDist:
    """Independent product measure over tuples of outcomes."""
    ps = list(ps)
    check_budget(math.prod(len(p) for p in ps), "product", limit)
    acc = {}
    for combo in itertools.product(*(p.items() for p in ps)):
        outcome = tuple(o for o, _ in combo)
        acc[outcome] = math.prod((w for _, w in combo), start=Fraction(1))
    return FiniteDist(acc, _trusted=True)


def uniform_shift_bound(a1: int, b1: int, a2: int, b2: int) -> tuple[Fraction, Fraction]:
    """Exact ``d_TV(x1, x1 + x2)`` for independent uniforms, with its upper bound.

    ``x1 ~ Uni[a1, b1]``, ``x2 ~ Uni[a2, b2]``, ``0 <= a2 <= b2 <= b1 - a1``.
    Returns ``(exact, b2 / (b1 - a1 + 1))``.
    """
    if not 0 <= a2 <= b2 <= b1 - a1:
        raise EmptyRange("need 0 <= a2 <= b2 <= b1 - a1")
    x1 = uniform_int(a1, b1)
    s = pushforward(product([x1, uniform_int(a2, b2)]), sum)
    return tv_distance(x1, s), Fraction(b2, b1 - a1 + 1)


# Monte-Carlo helpers ------------------------------------------------------

def empirical_tv(samples_p, samples_q, *, n_boot: int = 200,
                 rng: np.random.Generator | None = None) -> tuple[float, float]:
    """TV distance between two empirical histograms, with a bootstrap standard error.

    Returns ``(estimate, stderr)``.  The plug-in histogram distance is biased
    upward (noise in bins where the true masses agree only adds), so the
    estimate is bootstrap bias-corrected: ``2 * plug_in - mean(bootstrap)``,
    floored at zero.  With ``n_boot=0`` the raw plug-in value is returned.
    ``rng`` defaults to a fixed seed so results are reproducible.
    """
    if len(samples_p) == 0 or len(samples_q) == 0:
        raise EmptyRange("empirical_tv needs nonempty samples")
    rng = np.random.default_rng(0) if rng is None else rng
    codes, inverse = np.unique(
        np.asarray([repr(x) for x in samples_p] + [repr(x) for x in samples_q]),
        return_inverse=True,
    )
    k = len(codes)
    ip, iq = inverse[: len(samples_p)], inverse[len(samples_p):]
    est = _hist_tv(ip, iq, k)
    if n_boot <= 0:
        return est, 0.0
    boots = np.empty(n_boot)
    for b in range(n_boot):
        bp = ip[rng.integers(0, len(ip), len(ip))]
        bq = iq[rng.integers(0, len(iq), len(iq))]
        boots[b] = _hist_tv(bp, bq, k)
    corrected = max(0.0, 2.0 * est - float(boots.mean()))
    return corrected, float(boots.std(ddof=1))


def _hist_tv(ip: np.ndarray, iq: np.ndarray, k: int) -> float:
    hp = np.bincount(ip, minlength=k) / len(ip)
    hq = np.bincount(iq, minlength=k) / len(iq)
    return float(0.5 * np.abs(hp - hq).sum())
