from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cardcomp.distkit import FiniteDist, point, uniform
from cardcomp.errors import BadParam
from cardcomp.googol import ordinal_secretary_dp
from cardcomp.oracle import (
    LabeledObservationDist,
    bayes_secretary,
    bayes_single_shot,
    die_guess_game,
    evaluate_single_shot,
    max_guess_game,
)
from cardcomp.osi import build_osi_pairs, build_osi_triples, verify_osi
from cardcomp.universal import evaluate_cardinal, secretary_task

import oracles


def scaled_pairs(m):
    return uniform((20 * i, 20 * i + 20) for i in range(1, m + 1))


# single shot ------------------------------------------------------------------------------

def test_flat_posterior_gives_one():
    joint = FiniteDist({(i, o): Fraction(1, 9) for i in (1, 2, 3) for o in "abc"})
    d = LabeledObservationDist(joint, {1: 3, 2: 3, 3: 3})
    res = bayes_single_shot(d)
    assert res.value == 1
    assert set(res.policy.values()) == {1}  # ties go to the first label


@pytest.mark.parametrize("m", [1, 2, 3, 4, 7])
def test_scaled_pairs_value_is_one_plus_one_over_m(m):
    F = scaled_pairs(m)
    v = bayes_single_shot(die_guess_game(F)).value
    assert v == 1 + Fraction(1, m)
    assert v == oracles.die_guess_bayes(list(F.support), list(F.weights))


def test_perfect_information():
    joint = FiniteDist({(1, "x"): Fraction(1, 4), (2, "y"): Fraction(3, 4)})
    d = LabeledObservationDist(joint, {1: 5, 2: 2})
    assert bayes_single_shot(d).value == Fraction(1, 4) * 5 + Fraction(3, 4) * 2


@given(st.integers(0, 2**32 - 1))
def test_bayes_dominates_random_policies(seed):
    rng = np.random.default_rng(seed)
    d = die_guess_game(build_osi_triples(2, 12))
    best = bayes_single_shot(d).value
    obs = {o for _, o in d.joint}
    table = {}
    for o in obs:
        raw = rng.integers(0, 5, 3) + np.array([1, 0, 0])
        table[o] = FiniteDist({i + 1: Fraction(int(r), int(raw.sum())) for i, r in enumerate(raw)})
    assert evaluate_single_shot(d, table.__getitem__) <= best
    assert evaluate_single_shot(d, bayes_single_shot(d)) == best


@given(st.lists(st.integers(1, 9), min_size=3, max_size=3))
def test_die_guess_game_respects_custom_p(raw):
    p = [Fraction(r, sum(raw)) for r in raw]
    d = die_guess_game(build_osi_triples(1, 9), p)
    assert d.rewards == {i + 1: 1 / p[i] for i in range(3)}
    # a constant guess of label i earns p_i * (1/p_i) = 1
    for i in (1, 2, 3):
        assert evaluate_single_shot(d, lambda o, i=i: i) == 1


def test_labeled_dist_validation():
    joint = FiniteDist({(1, "x"): 1})
    with pytest.raises(BadParam):
        LabeledObservationDist(joint, {2: 1})
    with pytest.raises(BadParam):
        LabeledObservationDist(joint, {1: 1, 2: 1})
    with pytest.raises(BadParam):
        LabeledObservationDist(joint, {1: 0})
    with pytest.raises(BadParam):
        die_guess_game(uniform([(1, 2), (1, 2, 3)]))


def test_max_guess_game_rewards():
    d = max_guess_game(build_osi_pairs(5))
    assert d.rewards == {"no": 2, "yes": 2}
    assert evaluate_single_shot(d, lambda o: "yes") == 1
    assert evaluate_single_shot(d, lambda o: "no") == 1


# secretary -------------------------------------------------------------------------------------

def test_secretary_trivial_cases():
    assert bayes_secretary(point((4,))).value == 1
    assert bayes_secretary(point((2, 9))).value == 1


def test_secretary_pairs_value():
    F = build_osi_pairs(101)
    assert bayes_secretary(F).value == Fraction(101, 200)


def test_secretary_triples_value_matches_policy_evaluation():
    F = uniform(itertools.combinations(range(1, 8), 3))
    o = bayes_secretary(F)
    assert o.value == Fraction(53, 70)
    assert evaluate_cardinal(secretary_task(3), o.policy, F) == o.value


@st.composite
def set_dists(draw):
    n = draw(st.integers(2, 3))
    sets = draw(st.lists(st.lists(st.integers(1, 10), min_size=n, max_size=n, unique=True),
                         min_size=1, max_size=5))
    keys = list({tuple(sorted(s)) for s in sets})
    raw = draw(st.lists(st.integers(1, 5), min_size=len(keys), max_size=len(keys)))
    return FiniteDist({k: Fraction(r, sum(raw)) for k, r in zip(keys, raw)})


@given(set_dists())
def test_secretary_at_least_ordinal_and_within_tv_slack(F):
    o = bayes_secretary(F)
    n = o.n
    ordinal = ordinal_secretary_dp(n).value
    assert o.value >= ordinal
    assert o.value - ordinal <= n * verify_osi(F).max_subset_tv
    assert evaluate_cardinal(secretary_task(n), o.policy, F) == o.value


def test_secretary_size_mismatch():
    with pytest.raises(BadParam):
        bayes_secretary(build_osi_pairs(4), n=3)
