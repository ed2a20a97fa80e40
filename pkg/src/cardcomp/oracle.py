"""Brute-force Bayes-optimal values for single-shot guessing games and small secretary instances."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Mapping

from .distkit import FiniteDist, check_budget, point
from .errors import BadParam

__all__ = [
    "LabeledObservationDist",
    "SecretaryOracle",
    "SingleShotResult",
    "bayes_secretary",
    "bayes_single_shot",
    "die_guess_game",
    "evaluate_single_shot",
    "max_guess_game",
]


@dataclass(frozen=True)
class LabeledObservationDist:
    """Joint law of a hidden label and an observation, plus the reward for naming each label.

    Label order (used for tie-breaking) is the order of ``rewards``.
    """

    joint: FiniteDist
    rewards: Mapping[Hashable, Fraction]

    def __post_init__(self):
        rewards = {k: Fraction(v) for k, v in self.rewards.items()}
        if any(v <= 0 for v in rewards.values()):
            raise BadParam("rewards must be positive")
        marg: dict = {}
        for (label, _), w in self.joint.items():
            if label not in rewards:
                raise BadParam(f"label {label!r} has no reward")
            marg[label] = marg.get(label, Fraction(0)) + w
        missing = [lb for lb in rewards if not marg.get(lb)]
        if missing:
            raise BadParam(f"labels {missing} have zero probability")
        object.__setattr__(self, "rewards", rewards)

    @property
    def labels(self) -> tuple:
        return tuple(self.rewards)

    def scores(self) -> dict:
        """``obs -> {label: P(label, obs) * reward}``."""
        out: dict = {}
        for (label, obs), w in self.joint.items():
            out.setdefault(obs, {})[label] = w * self.rewards[label]
        return out


@dataclass
class SingleShotResult:
    value: Fraction
    policy: dict   # obs -> label

    def __call__(self, obs):
        return self.policy[obs]


def bayes_single_shot(d: LabeledObservationDist) -> SingleShotResult:
    """``sum_o max_i P(i, o) r_i`` with the argmax as the policy (ties to the earliest label)."""
    check_budget(len(d.joint), "single-shot posterior")
    value = Fraction(0)
    policy = {}
    for obs, sc in d.scores().items():
        best = max(d.labels, key=lambda lb: (sc.get(lb, Fraction(0)), -d.labels.index(lb)))
        policy[obs] = best
        value += sc.get(best, Fraction(0))
    return SingleShotResult(value, policy)


def evaluate_single_shot(d: LabeledObservationDist, policy: Callable[[Any], Any]) -> Fraction:
    """Expected reward of ``policy(obs)``, which returns a label or a FiniteDist over labels."""
    total = Fraction(0)
    cache: dict = {}
    for (label, obs), w in d.joint.items():
        if obs not in cache:
            g = policy(obs)
            cache[obs] = g if isinstance(g, FiniteDist) else point(g)
        total += w * cache[obs].prob(label) * d.rewards[label]
    return total


def _set_size(F: FiniteDist) -> int:
    sizes = {len(S) for S in F}
    if len(sizes) != 1:
        raise BadParam(f"sets of mixed sizes {sorted(sizes)}")
    return sizes.pop()


def die_guess_game(F: FiniteDist, p=None) -> LabeledObservationDist:
    """Hide ``s_i`` with ``i ~ p`` (uniform by default), reveal the rest, reward ``1 / p_i``."""
    n = _set_size(F)
    p = [Fraction(1, n)] * n if p is None else [Fraction(x) for x in p]
    if len(p) != n or sum(p) != 1 or any(x <= 0 for x in p):
        raise BadParam(f"p must be {n} positive weights summing to 1")
    acc: dict = {}
    for S, w in F.items():
        for i in range(1, n + 1):
            key = (i, S[: i - 1] + S[i:])
            acc[key] = acc.get(key, Fraction(0)) + w * p[i - 1]
    return LabeledObservationDist(FiniteDist(acc, _trusted=True), {i: 1 / p[i - 1] for i in range(1, n + 1)})


def max_guess_game(F: FiniteDist) -> LabeledObservationDist:
    """Hide a uniform element; ``"yes"`` (it was the maximum) pays ``n``, ``"no"`` pays ``n / (n-1)``."""
    n = _set_size(F)
    if n < 2:
        raise BadParam("maximum guessing needs n >= 2")
    acc: dict = {}
    w_i = Fraction(1, n)
    for S, w in F.items():
        for i in range(1, n + 1):
            key = ("yes" if i == n else "no", S[: i - 1] + S[i:])
            acc[key] = acc.get(key, Fraction(0)) + w * w_i
    return LabeledObservationDist(FiniteDist(acc, _trusted=True), {"no": Fraction(n, n - 1), "yes": Fraction(n)})


# Online secretary ------------------------------------------------------------

@dataclass
class SecretaryOracle:
    """Optimal stop-at-the-maximum play against a known value law, arrival order uniform."""

    n: int
    value: Fraction
    stop: dict = field(repr=False)      # sorted observed values -> P[current max is global max]
    cont: dict = field(repr=False)      # sorted observed values -> optimal continuation value

    def policy(self, k: int, ids: tuple, values: tuple, past: tuple) -> FiniteDist:
        """Cardinal policy: accept iff stopping is strictly better than continuing."""
        if any(past):
            return point(0)
        obs = tuple(sorted(values))
        if obs not in self.cont or values[-1] != obs[-1]:
            return point(0)
        return point(1 if self.stop[obs] > self.cont[obs] else 0)

    __call__ = policy


def bayes_secretary(F: FiniteDist, n: int | None = None) -> SecretaryOracle:
    """Backward induction over observed value sets; the state is sufficient because order is uniform."""
    size = _set_size(F)
    if n is not None and n != size:
        raise BadParam(f"sets have {size} elements, expected {n}")
    n = size
    check_budget(len(F) * 2**n, "secretary oracle states")
    containing: dict[tuple, list] = {}
    for S, w in F.items():
        if len(set(S)) != n:
            raise BadParam(f"set {S} has repeated values")
        S = tuple(sorted(S))
        for k in range(1, n + 1):
            for O in itertools.combinations(S, k):
                containing.setdefault(O, []).append((S, w))

    stop: dict = {}
    cont: dict = {}

    def value(O: tuple, cur) -> Fraction:
        c = cont_value(O)
        return max(stop[O], c) if cur == O[-1] else c

    def cont_value(O: tuple) -> Fraction:
        if O in cont:
            return cont[O]
        sets = containing[O]
        z = sum((w for _, w in sets), Fraction(0))
        stop[O] = sum((w for S, w in sets if S[-1] == O[-1]), Fraction(0)) / z
        k = len(O)
        if k == n:
            c = Fraction(0)
        else:
            c = Fraction(0)
            for S, w in sets:
                rest = [x for x in S if x not in O]
                inner = sum((value(tuple(sorted(O + (x,))), x) for x in rest), Fraction(0))
                c += w * inner / len(rest)
            c /= z
        cont[O] = c
        return c

    total = Fraction(0)
    for S, w in F.items():
        total += w * sum((value((x,), x) for x in S), Fraction(0)) / n
    return SecretaryOracle(n, total, stop, cont)
