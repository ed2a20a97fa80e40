"""Ordinal online tasks, exact policy evaluation and the cardinal-to-ordinal simulation.

Conventions
-----------
* Elements are labelled ``1..n``.  An arrival order ``pi`` is a tuple whose
  ``k``-th entry is the element arriving at step ``k``.
* A ranking ``sigma`` is a tuple with ``sigma[i-1]`` the rank of element
  ``i``; rank 1 is the smallest value and rank ``n`` the largest.
* Values are ``v_i = S[sigma(i)]`` for a sorted set ``S``.

Policies are plain callables returning a :class:`FiniteDist` over the step's
action set:

* cardinal: ``policy(k, ids, values, past_actions)``
* ordinal:  ``policy(k, ids, ranking, past_actions)``

where ``ids`` are the first ``k`` arrivals, ``values`` their numbers in
arrival order and ``ranking`` their relative ranks (1 = smallest among the
``k`` seen so far).  Past actions are passed so policies can respect
feasibility; they add no information an algorithm does not already have.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Sequence

from .distkit import FiniteDist, check_budget, point, tv_distance, uniform
from .errors import BadParam

__all__ = [
    "FAIL",
    "OrdinalTask",
    "SimPolicy",
    "die_guess_task",
    "evaluate_cardinal",
    "evaluate_ordinal",
    "jk_secretary_task",
    "offline_optimum",
    "ordinal_as_cardinal",
    "ordinalize",
    "relative_ranks",
    "secretary_task",
    "simulation_drift",
    "trivial_ordinal_policy",
    "two_sided_googol_task",
]

CardinalPolicy = Callable[[int, tuple, tuple, tuple], FiniteDist]
OrdinalPolicy = Callable[[int, tuple, tuple, tuple], FiniteDist]

FAIL = "fail"  # marker outcome for a failed simulation


def relative_ranks(values: Sequence) -> tuple[int, ...]:
    """Ascending ranks of ``values`` among themselves (1 = smallest)."""
    order = sorted(range(len(values)), key=lambda j: values[j])
    ranks = [0] * len(values)
    for r, j in enumerate(order, start=1):
        ranks[j] = r
    return tuple(ranks)


@dataclass
class OrdinalTask:
    """An n-round online task whose reward depends only on ranks and arrival order."""

    n: int
    arrival: FiniteDist
    ranks: FiniteDist
    actions: tuple[tuple[Hashable, ...], ...]
    feasible: Callable[[tuple], bool]
    reward: Callable[[tuple, tuple, tuple], Any]
    name: str = "task"
    _completable: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.actions) != self.n:
            raise BadParam(f"need {self.n} action sets, got {len(self.actions)}")
        if any(len(a) == 0 for a in self.actions):
            raise BadParam("action sets must be nonempty")

    def value(self, a: tuple, sigma: tuple, pi: tuple) -> Fraction:
        if not self.feasible(a):
            return Fraction(0)
        r = Fraction(self.reward(a, sigma, pi))
        if r < 0:
            raise BadParam(f"negative reward {r}")
        return r

    def completable(self, prefix: tuple) -> bool:
        """Whether some choice of the remaining actions makes ``prefix`` feasible."""
        if prefix not in self._completable:
            rest = self.actions[len(prefix):]
            self._completable[prefix] = any(
                self.feasible(prefix + tail) for tail in itertools.product(*rest)
            )
        return self._completable[prefix]

    def fallback_action(self, prefix: tuple):
        """Lexicographically first action that keeps ``prefix`` completable."""
        acts = sorted(self.actions[len(prefix)], key=repr)
        for a in acts:
            if self.completable(prefix + (a,)):
                return a
        return acts[0]

    def best_actions(self, sigma: tuple, pi: tuple) -> tuple[Fraction, tuple]:
        best, arg = Fraction(-1), None
        for a in itertools.product(*self.actions):
            v = self.value(a, sigma, pi)
            if v > best:
                best, arg = v, a
        return best, arg


# Built-in tasks -------------------------------------------------------------

def _all_perms(n: int) -> FiniteDist:
    return uniform(itertools.permutations(range(1, n + 1)))


def secretary_task(n: int) -> OrdinalTask:
    """Accept at most one element; reward 1 iff it is the maximum."""
    def feasible(a):
        return sum(a) <= 1

    def reward(a, sigma, pi):
        for k, act in enumerate(a):
            if act == 1:
                return int(sigma[pi[k] - 1] == n)
        return 0

    return OrdinalTask(n, _all_perms(n), _all_perms(n), ((0, 1),) * n, feasible, reward, "secretary")


def die_guess_task(n: int) -> OrdinalTask:
    """Watch ``n - 1`` arrivals, then guess the rank of the last one among all ``n``."""
    acts = ((0,),) * (n - 1) + (tuple(range(1, n + 1)),)

    def reward(a, sigma, pi):
        return int(a[-1] == sigma[pi[-1] - 1])

    return OrdinalTask(n, _all_perms(n), _all_perms(n), acts, lambda a: True, reward, "die-guess")


def jk_secretary_task(n: int, J: int, K: int) -> OrdinalTask:
    """Accept up to ``J`` elements; reward counts accepted elements among the ``K`` largest."""
    def reward(a, sigma, pi):
        return sum(1 for k, act in enumerate(a) if act == 1 and sigma[pi[k] - 1] > n - K)

    return OrdinalTask(n, _all_perms(n), _all_perms(n), ((0, 1),) * n,
                       lambda a: sum(a) <= J, reward, f"({J},{K})-secretary")


def two_sided_googol_task(n: int) -> OrdinalTask:
    """Two-sided googol on ``n`` slips (``2n`` faces); definition only.

    Faces ``i`` and ``i + n`` are the two sides of slip ``i``.  The first
    ``n`` arrivals are the face-up sides (no action); the player then turns
    the slips in the same order and wins by accepting the largest face-down
    number.
    """
    m = 2 * n
    orders: dict[tuple, Fraction] = {}
    w = Fraction(1, math.factorial(n) * 2**n)
    for rho in itertools.permutations(range(1, n + 1)):
        for flips in itertools.product((0, n), repeat=n):
            up = tuple(r + x for r, x in zip(rho, flips))
            down = tuple(r + n - x for r, x in zip(rho, flips))
            orders[up + down] = w
    acts = ((None,),) * n + ((0, 1),) * n

    def feasible(a):
        return sum(x for x in a[n:]) <= 1

    def reward(a, sigma, pi):
        later = [sigma[pi[k] - 1] for k in range(n, m)]
        for k in range(n, m):
            if a[k] == 1:
                return int(sigma[pi[k] - 1] == max(later))
        return 0

    return OrdinalTask(m, FiniteDist(orders), _all_perms(m), acts, feasible, reward, "two-sided-googol")


# Evaluation -----------------------------------------------------------------

def _walk(task: OrdinalTask, sigma: tuple, pi: tuple, observe: Callable[[int], tuple],
          policy: Callable) -> Fraction:
    """Expected reward of ``policy`` on one fixed ``(sigma, pi)`` (and values)."""
    n = task.n

    def rec(k: int, past: tuple) -> Fraction:
        if k > n:
            return task.value(past, sigma, pi)
        ids = pi[:k]
        dist = policy(k, ids, observe(k), past)
        total = Fraction(0)
        for a, w in dist.items():
            if a not in task.actions[k - 1]:
                raise BadParam(f"policy returned {a!r} outside A_{k}")
            total += w * rec(k + 1, past + (a,))
        return total

    return rec(1, ())


def _action_space(task: OrdinalTask) -> int:
    return math.prod(len(a) for a in task.actions)


def evaluate_ordinal(task: OrdinalTask, policy: OrdinalPolicy) -> Fraction:
    """Exact ``E[R(ALG(sigma, pi), sigma, pi)]`` over the task's order and rank laws."""
    check_budget(len(task.arrival) * len(task.ranks) * _action_space(task), "evaluate_ordinal")
    total = Fraction(0)
    for pi, wp in task.arrival.items():
        for sigma, ws in task.ranks.items():
            seen = tuple(sigma[i - 1] for i in pi)
            total += wp * ws * _walk(task, sigma, pi, lambda k: relative_ranks(seen[:k]), policy)
    return total


def evaluate_cardinal(task: OrdinalTask, policy: CardinalPolicy, F: FiniteDist) -> Fraction:
    """Exact expected reward of a value-seeing policy with ``S ~ F`` and ``sigma ~ D_sigma``."""
    check_budget(len(task.arrival) * len(task.ranks) * len(F) * _action_space(task), "evaluate_cardinal")
    for S in F:
        if len(S) != task.n:
            raise BadParam(f"set {S} does not have {task.n} elements")
    total = Fraction(0)
    for pi, wp in task.arrival.items():
        for sigma, ws in task.ranks.items():
            for S, wf in F.items():
                vals = tuple(S[sigma[i - 1] - 1] for i in pi)
                total += wp * ws * wf * _walk(task, sigma, pi, lambda k: vals[:k], policy)
    return total


def offline_optimum(task: OrdinalTask) -> Fraction:
    """``E[max_a R(a, sigma, pi)]``."""
    check_budget(len(task.arrival) * len(task.ranks) * _action_space(task), "offline_optimum")
    return sum(
        (wp * ws * task.best_actions(sigma, pi)[0]
         for pi, wp in task.arrival.items() for sigma, ws in task.ranks.items()),
        Fraction(0),
    )


def trivial_ordinal_policy(task: OrdinalTask) -> OrdinalPolicy:
    """Bet on the single most valuable ``(pi, sigma)`` and replay its best actions."""
    best, plan = Fraction(-1), None
    for pi, wp in task.arrival.items():
        for sigma, ws in task.ranks.items():
            v, a = task.best_actions(sigma, pi)
            if wp * ws * v > best:
                best, plan = wp * ws * v, a
    assert plan is not None

    def policy(k, ids, ranking, past):
        return point(plan[k - 1])

    policy.plan = plan
    return policy


def ordinal_as_cardinal(policy: OrdinalPolicy) -> CardinalPolicy:
    """View an ordinal policy as a cardinal one that only compares values."""
    def card(k, ids, values, past):
        return policy(k, ids, relative_ranks(values), past)
    return card


# The simulation -------------------------------------------------------------

class SimPolicy:
    """Ordinal policy that feeds a cardinal policy synthetic values drawn from ``F``.

    At step 1 the synthetic value is the smallest element of a fresh
    ``S ~ F``.  At step ``k`` the earlier synthetic values ``w_j`` sit at the
    ranks ``r_j`` given by the current ranking; ``F`` is conditioned on
    ``S[r_j] = w_j`` for ``j < k`` and the new value is ``S[r_k]``.  If the
    conditional has zero mass the simulation has failed and plays
    :meth:`OrdinalTask.fallback_action` from then on.

    The joint law of (synthetic values, actions) is computed exactly and the
    policy's output at step ``k`` is the conditional law of ``a_k`` given the
    past actions, so evaluating it with :func:`evaluate_ordinal` gives the
    simulation's exact expected reward.
    """

    def __init__(self, task: OrdinalTask, cardinal: CardinalPolicy, F: FiniteDist):
        self.task = task
        self.cardinal = cardinal
        self.F = F
        self._joint: dict[tuple, FiniteDist] = {}
        self._values: dict[tuple, FiniteDist] = {}

    # synthetic values alone (policy independent)
    def value_law(self, ranking: tuple) -> FiniteDist:
        """Law of the synthetic values (arrival order) after ``len(ranking)`` steps, or FAIL."""
        key = ranking
        if key in self._values:
            return self._values[key]
        k = len(ranking)
        if k == 1:
            out = self.F.map(lambda s: (s[0],))
        else:
            prev = self.value_law(relative_ranks(ranking[:-1]))
            acc: dict[Hashable, Fraction] = {}
            for w, p in prev.items():
                for nxt, q in self._extend(w, ranking).items():
                    acc[nxt] = acc.get(nxt, Fraction(0)) + p * q
            out = FiniteDist(acc, _trusted=True)
        self._values[key] = out
        return out

    def _extend(self, w, ranking: tuple) -> FiniteDist:
        if w == FAIL:
            return point(FAIL)
        k = len(ranking)
        slots = ranking[: k - 1]
        kept = {S: p for S, p in self.F.items()
                if all(S[r - 1] == x for r, x in zip(slots, w))}
        mass = sum(kept.values(), Fraction(0))
        if not mass:
            return point(FAIL)
        acc: dict[Hashable, Fraction] = {}
        r = ranking[-1]
        for S, p in kept.items():
            nxt = w + (S[r - 1],)
            acc[nxt] = acc.get(nxt, Fraction(0)) + p / mass
        return FiniteDist(acc, _trusted=True)

    def joint(self, ids: tuple, ranking: tuple) -> FiniteDist:
        """Joint law of ``(synthetic values or FAIL, actions a_1..a_k)``."""
        key = (ids, ranking)
        if key in self._joint:
            return self._joint[key]
        k = len(ranking)
        if k == 1:
            prev = FiniteDist({((), ()): 1}, _trusted=True)
        else:
            prev = self.joint(ids[:-1], relative_ranks(ranking[:-1]))
        acc: dict[Hashable, Fraction] = {}
        for (w, acts), p in prev.items():
            nxt = self.F.map(lambda s: (s[0],)) if k == 1 else self._extend(w, ranking)
            for w2, q in nxt.items():
                if w2 == FAIL:
                    adist = point(self.task.fallback_action(acts))
                else:
                    adist = self.cardinal(k, ids, w2, acts)
                for a, r in adist.items():
                    o = (w2, acts + (a,))
                    acc[o] = acc.get(o, Fraction(0)) + p * q * r
        out = FiniteDist(acc, _trusted=True)
        self._joint[key] = out
        return out

    def __call__(self, k: int, ids: tuple, ranking: tuple, past: tuple) -> FiniteDist:
        joint = self.joint(tuple(ids), tuple(ranking))
        acc: dict[Hashable, Fraction] = {}
        for (w, acts), p in joint.items():
            if acts[:-1] == tuple(past):
                acc[acts[-1]] = acc.get(acts[-1], Fraction(0)) + p
        mass = sum(acc.values(), Fraction(0))
        if not mass:
            # past actions the simulation never produces; keep the run feasible
            return point(self.task.fallback_action(tuple(past)))
        return FiniteDist({a: w / mass for a, w in acc.items()}, _trusted=True)

    def failure_probability(self, ranking: tuple) -> Fraction:
        return self.value_law(ranking).prob(FAIL)


def ordinalize(task: OrdinalTask, cardinal: CardinalPolicy, F: FiniteDist) -> SimPolicy:
    """The simulation reduction: an ordinal policy mimicking ``cardinal`` on ``F``."""
    for S in F:
        if len(S) != task.n:
            raise BadParam(f"set {S} does not have {task.n} elements")
    return SimPolicy(task, cardinal, F)


@dataclass
class DriftReport:
    drift: list[Fraction]           # worst case over rankings, per step
    failure: list[Fraction]         # worst-case failure probability, per step
    delta: Fraction                 # max subset TV of F
    within_bound: bool              # drift_k <= (k - 1) * delta for every k

    def to_dict(self) -> dict:
        q = lambda x: f"{x.numerator}/{x.denominator}"  # noqa: E731
        return {
            "drift": [q(x) for x in self.drift],
            "failure": [q(x) for x in self.failure],
            "delta": q(self.delta),
            "within_bound": self.within_bound,
        }


def simulation_drift(task: OrdinalTask, F: FiniteDist, delta: Fraction | None = None) -> DriftReport:
    """Per-step TV between the simulation's sorted synthetic prefix and ``S_[k]``.

    The synthetic values depend only on the ranking seen so far, so the
    maximum is over all rankings of ``k`` elements.  A failed run counts as
    its own outcome, which the true law never produces.
    """
    from .osi import verify_osi

    n = task.n
    if delta is None:
        delta = verify_osi(F).max_subset_tv if n >= 2 else Fraction(0)
    sim = SimPolicy(task, lambda k, ids, v, past: point(task.actions[k - 1][0]), F)
    drift, failure = [], []
    for k in range(1, n + 1):
        truth = F.map(lambda s: s[:k])
        worst, worst_fail = Fraction(0), Fraction(0)
        for ranking in itertools.permutations(range(1, k + 1)):
            law = sim.value_law(ranking).map(lambda w: w if w == FAIL else tuple(sorted(w)))
            worst = max(worst, tv_distance(law, truth))
            worst_fail = max(worst_fail, law.prob(FAIL))
        drift.append(worst)
        failure.append(worst_fail)
    ok = all(d <= (k - 1) * delta for k, d in enumerate(drift, start=1))
    return DriftReport(drift, failure, delta, ok)
