from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cardcomp.distkit import FiniteDist, mixture, point, uniform
from cardcomp.errors import BadLength, BadParam, BudgetExceeded, IndexOutOfRange, Overflow
from cardcomp.googol import (
    always_no,
    always_yes,
    appc_simulation,
    appc_trials,
    build_transition_matrix,
    check_level_perm,
    delete_level,
    failure_bound,
    level_construction_dist,
    level_distribution,
    level_maxguess_bayes,
    level_secretary_dp,
    level_value_bound,
    make_googol_policy,
    max_guess_eval,
    observed_levels,
    ordinal_secretary_dp,
    sample_instance,
    sample_levels,
    split_gaps,
    stationary_distribution,
    uniform_delete,
    verify_deletion_identities,
    verify_sim_exact,
)
from cardcomp.oracle import bayes_single_shot, max_guess_game
from cardcomp.osi import build_osi_pairs, build_osi_triples

import oracles

F = Fraction


# deletions and the chain -------------------------------------------------------------

def test_delete_level_examples():
    assert delete_level((4, 1, 3, 2), 2) == (4, 3, 2)
    assert delete_level((4, 1, 3, 2), 1) == (4, 3, 2)
    assert delete_level((4, 1, 3, 2), 4) == (4, 1, 3)
    assert delete_level((4, 1, 3, 2), 3) == (4, 1, 3)
    with pytest.raises(IndexOutOfRange):
        delete_level((3, 1, 2), 4)
    with pytest.raises(IndexOutOfRange):
        delete_level((3, 1, 2), 0)


def test_check_level_perm():
    assert check_level_perm([3, 1, 2]) == (3, 1, 2)
    with pytest.raises(BadParam):
        check_level_perm((2, 3, 1))
    with pytest.raises(BadParam):
        check_level_perm((3, 1, 1))


def test_chain_n3():
    chain = build_transition_matrix(3)
    assert chain.states == ((3, 1, 2), (3, 2, 1))
    assert chain.matrix == [[0, 1], [F(1, 2), F(1, 2)]]
    assert stationary_distribution(chain) == (F(1, 3), F(2, 3))


def test_chain_n4_stationary_and_row():
    chain = build_transition_matrix(4)
    p = stationary_distribution(chain)
    assert p == (F(5, 66), F(6, 66), F(7, 66), F(2, 11), F(5, 22), F(7, 22))
    assert chain.row((4, 1, 2, 3)) == [0, F(1, 3), 0, F(2, 3), 0, 0]


@pytest.mark.parametrize("n", [3, 4, 5])
def test_chain_matches_sympy_oracle(n):
    states, M, p = oracles.level_chain(n)
    chain = build_transition_matrix(n)
    assert list(chain.states) == states
    assert chain.matrix == [[F(int(M[a, b].p), int(M[a, b].q)) for b in range(len(states))]
                            for a in range(len(states))]
    assert list(stationary_distribution(chain)) == p


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_rows_are_stochastic_and_p_is_fixed(n):
    chain = build_transition_matrix(n)
    p = stationary_distribution(chain)
    assert all(sum(r) == 1 for r in chain.matrix)
    m = len(p)
    assert all(sum(p[i] * chain.matrix[i][j] for i in range(m)) == p[j] for j in range(m))


def test_chain_errors():
    with pytest.raises(BadParam):
        build_transition_matrix(2)
    with pytest.raises(BudgetExceeded):
        build_transition_matrix(9)


def test_level_distribution_small_n():
    assert level_distribution(1) == point((1,))
    assert level_distribution(2) == point((2, 1))
    assert level_distribution(3) == FiniteDist({(3, 1, 2): F(1, 3), (3, 2, 1): F(2, 3)})


# U and V ---------------------------------------------------------------------------------

def test_uniform_delete_examples():
    d = point((3, 1, 2))
    assert uniform_delete(d, "U") == FiniteDist({(3, 2): F(2, 3), (3, 1): F(1, 3)})
    assert uniform_delete(d, "V") == point((3, 2))
    with pytest.raises(BadParam):
        uniform_delete(d, "W")
    with pytest.raises(BadLength):
        uniform_delete(uniform([(2, 1), (3, 1, 2)]), "U")
    with pytest.raises(BadLength):
        uniform_delete(point((1,)), "V")


@given(st.integers(2, 6).flatmap(lambda k: st.permutations(range(1, k + 1))))
def test_u_splits_into_last_deletion_and_v(lam):
    lam = tuple(lam)
    k = len(lam)
    d = point(lam)
    expected = mixture([(F(1, k), d.map(lambda x: delete_level(x, k))),
                        (F(k - 1, k), uniform_delete(d, "V"))])
    assert uniform_delete(d, "U") == expected


@pytest.mark.parametrize("n", [3, 4, 5])
def test_deletion_identities(n):
    rep = verify_deletion_identities(n)
    assert rep.passed
    assert [r["k"] for r in rep.per_k] == list(range(1, n))


def test_deletion_identity_one_step_against_oracle():
    # U(F) computed from the sympy stationary vector and a hand pushforward
    states, _, p = oracles.level_chain(4)
    base = dict(zip(states, p))
    u = oracles.deletion_pushforward(base, lambda k: range(1, k + 1))
    last = oracles.deletion_pushforward(base, lambda k: [k])
    assert uniform_delete(level_distribution(4), "U") == FiniteDist(u)
    assert FiniteDist(last) == FiniteDist(u)


def test_deletion_identity_cap():
    with pytest.raises(BudgetExceeded):
        verify_deletion_identities(7)


# secretary DPs --------------------------------------------------------------------------------

@pytest.mark.parametrize("n,value", [(1, F(1)), (2, F(1, 2)), (3, F(1, 2)), (4, F(11, 24))])
def test_ordinal_dp_values(n, value):
    assert ordinal_secretary_dp(n).value == value


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_ordinal_dp_matches_best_threshold_rule(n):
    truth = oracles.threshold_rule_values(n)
    dp = ordinal_secretary_dp(n)
    assert dp.value == max(truth.values())
    assert truth[dp.threshold] == dp.value


def test_ordinal_dp_errors():
    with pytest.raises(BadParam):
        ordinal_secretary_dp(0)
    with pytest.raises(BudgetExceeded):
        ordinal_secretary_dp(11)


def test_observed_levels():
    assert observed_levels((4, 1, 3, 2), (2, 4)) == (4, 3)
    assert observed_levels((4, 1, 3, 2), (1, 2, 3, 4)) == (4, 1, 3, 2)
    assert observed_levels((4, 1, 3, 2), (3,)) == (4,)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_level_dp_equals_ordinal(n):
    dp = level_secretary_dp(n)
    assert dp.equal, dp.mismatches[:3]
    assert dp.value == ordinal_secretary_dp(n).value
    assert dp.history_induced


def test_level_dp_cap():
    with pytest.raises(BudgetExceeded):
        level_secretary_dp(7)


# instances --------------------------------------------------------------------------------------

def test_level_value_bound():
    assert level_value_bound(3, 2) == 14
    assert level_value_bound(4, 40) == 40 + 1600 + 64000 + 2560000


def test_sample_instance_shape(rng):
    for _ in range(200):
        inst = sample_instance(3, 2, rng)
        assert inst.rho[0] == 3
        assert max(inst.values) <= 14 == inst.N
        assert all(1 <= g <= 2**r for g, r in zip(inst.gaps, inst.rho))
    with pytest.raises(Overflow):
        sample_instance(20, 10**4, rng)
    with pytest.raises(BadParam):
        sample_instance(3, 1, rng)


def test_sampled_level_frequencies(rng):
    n, m = 4, 20000
    draws = sample_levels(n, rng, m)
    assert (draws[:, 0] == n).all()
    for rho, p in level_distribution(n).items():
        freq = float(np.all(draws == np.array(rho), axis=1).mean())
        sd = (float(p) * (1 - float(p)) / m) ** 0.5
        assert abs(freq - float(p)) <= 4 * sd


def test_level_construction_dist_small():
    G = level_construction_dist(2, 2)
    # rho = (2, 1): gaps (d1 in [4], d2 in [2])
    assert len(G) == 8 and sum(G.weights) == 1
    assert G.prob((1, 2)) == F(1, 8)
    with pytest.raises(BudgetExceeded):
        level_construction_dist(3, 8, limit=100)


# gap splitting ---------------------------------------------------------------------------------

def test_failure_bound():
    assert failure_bound(4, 40) == F(3, 39)


@pytest.mark.parametrize("n,delta", [(2, 3), (3, 3), (3, 4)])
def test_exact_splitting_check(n, delta):
    rep = verify_sim_exact(n, delta)
    assert rep.failure_probability == oracles.splitting_failure(n, delta)
    assert rep.injective and rep.in_support and rep.consistent and rep.probabilities_match


def test_exact_splitting_example_value():
    rep = verify_sim_exact(3, 3)
    assert rep.failure_probability == F(109, 243)
    assert rep.failure_probability <= rep.bound == 1
    assert rep.passed


def test_split_gaps_hand_example():
    # pi = (2, 1): rank 2 arrives first, then rank 1 splits its gap
    steps = split_gaps((2, 1), (2, 1), (3, 10))
    assert steps[0] == ((2,), (10,), {2: 10})
    levels, gaps, vals = steps[1]
    assert levels == (2, 1) and gaps == (7, 3)
    assert vals == {1: 7, 2: 10}


@given(st.integers(0, 2**32 - 1))
def test_split_gaps_values_never_move(seed):
    rng = np.random.default_rng(seed)
    n, delta = 4, 6
    run = appc_simulation(n, delta, make_googol_policy("never", n), rng)
    if run.failed:
        assert run.gaps is None
        return
    assert run.consistent
    assert all(1 <= g <= delta**lv for g, lv in zip(run.gaps, run.rho))


def test_appc_trials_within_bound(rng):
    rep = appc_trials(4, 40, make_googol_policy("ordinal", 4), 5000, rng)
    assert rep.within_bound and rep.all_consistent
    assert rep.failures + rep.wins <= rep.trials
    assert 0.3 < rep.win_rate < 0.5


def test_appc_argument_checks(rng):
    with pytest.raises(BadParam):
        appc_trials(4, 4, make_googol_policy("never", 4), 10, rng)
    with pytest.raises(BadParam):
        make_googol_policy("sometimes", 3)
    with pytest.raises(BadParam):
        make_googol_policy("value:x", 3)


def test_googol_policies():
    first = make_googol_policy("first", 3)
    assert first((5,), 10)
    by_value = make_googol_policy("value:1/2", 3)
    assert by_value((6,), 10) and not by_value((4,), 10) and not by_value((6, 4), 10)
    assert by_value((1, 2, 3), 10)
    ordinal = make_googol_policy("ordinal", 4)
    assert not ordinal((9,), 10) and ordinal((1, 9), 10)


# maximum guessing --------------------------------------------------------------------------------

@pytest.mark.parametrize("dist", [build_osi_pairs(11), build_osi_triples(2, 12), point((3, 7, 9)),
                                  level_construction_dist(3, 2)])
def test_constant_guesses_score_one(dist):
    assert max_guess_eval(dist, always_yes) == 1
    assert max_guess_eval(dist, always_no) == 1


def test_max_guess_point_mass():
    pol = lambda obs: "yes" if obs == (1,) else "no"  # noqa: E731
    assert max_guess_eval(point((1, 100)), pol) == 2


def test_max_guess_errors():
    with pytest.raises(BadParam):
        max_guess_eval(point((4,)), always_yes)
    with pytest.raises(BadParam):
        max_guess_eval(uniform([(1, 2), (1, 2, 3)]), always_yes)
    with pytest.raises(BadParam):
        max_guess_eval(point((1, 2)), lambda o: "maybe")


@pytest.mark.parametrize("delta,adv", [(2, F(31, 96)), (3, F(5, 27)), (4, F(33, 256))])
def test_level_bayes_matches_generic_oracle(delta, adv):
    G = level_construction_dist(3, delta)
    fast = level_maxguess_bayes(3, delta)
    assert fast.advantage == adv
    assert bayes_single_shot(max_guess_game(G)).value == fast.value
    assert max_guess_eval(G, fast.decide) == fast.value


def test_level_bayes_advantage_shrinks():
    advs = [level_maxguess_bayes(3, d).advantage for d in (4, 6, 8)]
    assert advs == [F(33, 256), F(23, 288), F(355, 6144)]
    assert all(a <= F(3, d) for a, d in zip(advs, (4, 6, 8)))
    assert advs[0] >= advs[1] >= advs[2]


def test_level_bayes_monte_carlo(rng):
    b = level_maxguess_bayes(3, 4)
    mean, se = b.monte_carlo(rng, 4000)
    assert abs(mean - float(b.value)) <= 4 * se


def test_level_bayes_errors():
    with pytest.raises(BadParam):
        level_maxguess_bayes(1, 4)
    with pytest.raises(BudgetExceeded):
        level_maxguess_bayes(3, 8, limit=1000)

