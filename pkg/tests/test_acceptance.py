"""The thirteen acceptance criteria, each at its stated tolerance and time budget.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""
from __future__ import annotations

import csv
import io
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from cardcomp import cli
from cardcomp import experiments as ex
from cardcomp import googol as G
from cardcomp import rankguess as R
from cardcomp import universal as U
from cardcomp.distkit import FiniteDist, point, tv_distance
from cardcomp.oracle import bayes_secretary, bayes_single_shot, die_guess_game, max_guess_game
from cardcomp.osi import build_osi_pairs, build_osi_triples, verify_osi

import oracles

F = Fraction
STATIONARY_4 = tuple(F(x) for x in ("5/66", "6/66", "7/66", "2/11", "5/22", "7/22"))


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.1f}s, budget {seconds}s"


# 1 -----------------------------------------------------------------------------------------

@pytest.mark.criterion(1, "stationary vector n=4 via `googol chain --n 4`, exact")
def test_c01_stationary_vector(capsys):
    G.levels._cached_chain.cache_clear()
    with budget(1):
        code = cli.main(["googol", "chain", "--n", "4"])
    assert code == 0
    rows = [r for r in csv.DictReader(io.StringIO(capsys.readouterr().out))
            if r["experiment"] == "googol.stationary"]
    assert tuple(F(int(r["num"]), int(r["den"])) for r in rows) == STATIONARY_4
    _, _, p = oracles.level_chain(4)
    assert tuple(p) == STATIONARY_4


# 2 -----------------------------------------------------------------------------------------

@pytest.mark.criterion(2, "transition row of (4,1,2,3) equals (0, 1/3, 0, 2/3, 0, 0)")
def test_c02_transition_row():
    with budget(1):
        chain = G.build_transition_matrix(4)
    assert chain.row((4, 1, 2, 3)) == [0, F(1, 3), 0, F(2, 3), 0, 0]
    states, M, _ = oracles.level_chain(4)
    a = states.index((4, 1, 2, 3))
    assert [F(int(M[a, b].p), int(M[a, b].q)) for b in range(6)] == chain.row((4, 1, 2, 3))


# 3 -----------------------------------------------------------------------------------------

def _oracle_identities(n):
    states, _, p = oracles.level_chain(n)
    u = v_prev = dict(zip(states, p))
    for k in range(1, n):
        u = oracles.deletion_pushforward(u, lambda m: range(1, m + 1))
        v = oracles.deletion_pushforward(v_prev, lambda m: range(1, m))
        d = oracles.deletion_pushforward(v_prev, lambda m, j=n - k + 1: [j])
        yield k, FiniteDist(u), FiniteDist(d), FiniteDist(v)
        v_prev = v


@pytest.mark.criterion(3, "deletion identities U^k F = D_{n-k+1} V^{k-1} F = V^k F, n in {3,4,5}")
@pytest.mark.parametrize("n", [3, 4, 5])
def test_c03_deletion_identities(n):
    with budget(60):
        rep = G.verify_deletion_identities(n)
    assert [r["k"] for r in rep.per_k] == list(range(1, n))
    assert rep.passed
    for k, u, d, v in _oracle_identities(n):
        assert u == d == v, k


# 4 -----------------------------------------------------------------------------------------

@pytest.mark.criterion(4, "level DP g = f at every reachable state, value = ordinal optimum")
@pytest.mark.parametrize("n,value", [(3, F(1, 2)), (4, F(11, 24)), (5, None)])
def test_c04_level_dp(n, value):
    with budget(300):
        dp = G.level_secretary_dp(n)
    assert not dp.mismatches and not dp.accept_mismatches
    assert dp.value == dp.ordinal.value == max(oracles.threshold_rule_values(n).values())
    if value is not None:
        assert dp.value == value


# 5 -----------------------------------------------------------------------------------------

@pytest.mark.criterion(5, "value-oblivious policies score exactly 1 (100 instances per n in 4..7)")
def test_c05_value_oblivious(rng):
    with budget(60):
        for n in range(4, 8):
            policies = [R.RandomPolicy(),
                        R.ConstantPolicy(point(1)),
                        R.ConstantPolicy(FiniteDist({1: F(1, 3), n: F(2, 3)}))]
            for _ in range(100):
                inst = R.RankGuessInstance(*R.random_instance(n, rng))
                for pol in policies:
                    assert R.worst_case_expected_reward(inst, pol) == 1, (inst, pol)


# 6 -----------------------------------------------------------------------------------------

@pytest.mark.criterion(6, "Mono-Gaps: reward >= 1, and >= 1 + 1/(3(n-3)) off the Fibonacci-like shape")
def test_c06_mono_gaps(rng):
    pol = R.MonoGapsPolicy()
    strong_seen = 0
    with budget(600):
        for n in range(4, 8):
            gain = 1 + F(1, 3 * (n - 3))
            for _ in range(1000):
                vals, N = R.random_instance(n, rng)
                assert N <= 10**6 and min(R.diffs(vals)) >= 20
                v = R.worst_case_expected_reward(R.RankGuessInstance(vals, N), pol)
                assert v >= 1, vals
                d = R.diffs(vals)
                if R.is_strictly_monotone(d) is None or R.fibonacci_violated(d):
                    strong_seen += 1
                    assert v >= gain, vals
            # monotone instances are rare under uniform sampling; add some of each kind
            for level, dec in ((1, False), (1, True), (2, False), (2, True)):
                for satisfy in (False, True):
                    vals, N = R.level_instance(n, level, rng, satisfy=satisfy, decreasing=dec)
                    if vals[-1] > 10**6:
                        continue
                    d = R.diffs(vals)
                    v = R.worst_case_expected_reward(R.RankGuessInstance(vals, N), pol)
                    assert v >= 1, vals
                    if R.fibonacci_violated(d):
                        assert v >= gain, vals
    assert strong_seen > 3000


# 7 -----------------------------------------------------------------------------------------

def _exp_cases(level, rng, per_cell):
    for n in (4, 5, 6):
        for dec in (False, True):
            for satisfy in (False, True):
                for _ in range(per_cell):
                    vals, N = R.level_instance(n, level, rng, satisfy=satisfy, decreasing=dec)
                    yield n, satisfy, vals, N


@pytest.mark.criterion(7, "Exp-Gaps: >= 1 + (n-3)/(n(n-1)) between levels l-1 and l, >= 1 at level l")
@pytest.mark.parametrize("level", [2, 3, 4, 5, 6])
def test_c07_exp_gaps(level, rng):
    pol = R.ExpGapsPolicy(level)
    with budget(120):
        for n, satisfy, vals, N in _exp_cases(level, rng, 40):
            d = R.diffs(vals)
            assert R.level_condition(d, level - 1)
            assert R.level_condition(d, level) == satisfy
            v = R.worst_case_expected_reward(R.RankGuessInstance(vals, N), pol)
            assert v >= (1 if satisfy else 1 + F(n - 3, n * (n - 1))), (level, vals, N, v)


@pytest.mark.criterion(7, "Exp-Gaps: >= 1 + (n-3)/(n(n-1)) between levels l-1 and l, >= 1 at level l")
def test_c07_exp_gaps_level1_satisfied(rng):
    pol = R.ExpGapsPolicy(1)
    for n in (4, 5, 6):
        for dec in (False, True):
            for _ in range(40):
                vals, N = R.level_instance(n, 1, rng, satisfy=True, decreasing=dec)
                assert R.level_condition(R.diffs(vals), 1)
                assert R.worst_case_expected_reward(R.RankGuessInstance(vals, N), pol) >= 1


@pytest.mark.criterion(7, "Exp-Gaps: >= 1 + (n-3)/(n(n-1)) between levels l-1 and l, >= 1 at level l")
@pytest.mark.xfail(strict=True, reason="level 1 on Fibonacci-like gaps: deleting s_2 can make the observed "
                                       "gaps look decreasing, so index 2 leaves the candidate set")
def test_c07_exp_gaps_level1_gain(rng):
    pol = R.ExpGapsPolicy(1)
    vals, N = ex.EXP_LEVEL1_COUNTEREXAMPLE
    d = R.diffs(vals)
    assert R.level_condition(d, 0) and not R.level_condition(d, 1)
    cases = [(4, vals, N)] + [(n, v, m) for n, s, v, m in _exp_cases(1, rng, 20)]
    for n, v, m in cases:
        got = R.worst_case_expected_reward(R.RankGuessInstance(v, m), pol)
        assert got >= 1 + F(n - 3, n * (n - 1)), (v, m, got)


# 8 -----------------------------------------------------------------------------------------

@pytest.mark.criterion(8, "n=2 warm-up, N=100: reward = 1 + (s2-s1-2)/N >= 1.18 for every valid S")
def test_c08_warmup2():
    N = 100
    pol = R.Warmup2Policy()
    count = 0
    with budget(60):
        for s1 in range(1, N + 1):
            for s2 in range(s1 + 20, N + 1):
                v = R.worst_case_expected_reward(R.RankGuessInstance((s1, s2), N), pol)
                assert v == 1 + F(s2 - s1 - 2, N) >= F(118, 100)
                count += 1
    assert count == sum(N - s1 - 19 for s1 in range(1, N - 18))


# 9 -----------------------------------------------------------------------------------------

@pytest.mark.criterion(9, "OSI pairs TV = 1/(N-1); triples TV non-increasing in lmax at fixed density")
def test_c09_osi():
    with budget(60):
        for N in (21, 101, 1001):
            assert verify_osi(build_osi_pairs(N)).max_deletion_tv == F(1, N - 1)
        reps = [verify_osi(build_osi_triples(lm, 8 * 2 ** (lm + 1))) for lm in range(1, 6)]
    tvs = [r.max_subset_tv for r in reps]
    assert all(r.subset_mode == "all" and r.amplification_ok for r in reps)
    assert all(a >= b for a, b in zip(tvs, tvs[1:])), tvs
    assert tvs[-1] < tvs[0]


# 10 ----------------------------------------------------------------------------------------

@pytest.mark.criterion(10, "n=2 secretary on pairs(101): cardinal - simulated <= 2/100, drift(k=2) <= 1/100")
def test_c10_universal_reduction():
    dist = build_osi_pairs(101)
    task = U.secretary_task(2)
    with budget(60):
        bayes = bayes_secretary(dist)
        card = U.evaluate_cardinal(task, bayes.policy, dist)
        sim = U.evaluate_ordinal(task, U.ordinalize(task, bayes.policy, dist))
        drift = U.simulation_drift(task, dist)
    assert 0 <= card - sim <= 2 * F(1, 100)
    assert drift.drift[1] <= F(1, 100)


# 11 ----------------------------------------------------------------------------------------

@pytest.mark.criterion(11, "die guessing over 4 scaled pairs: Bayes value exactly 5/4")
def test_c11_oracle_pairs():
    dist = ex.parse_dist("scaled-pairs:4")
    with budget(1):
        v = bayes_single_shot(die_guess_game(dist)).value
    assert v == F(5, 4) == oracles.die_guess_bayes(list(dist.support), list(dist.weights))


# 12 ----------------------------------------------------------------------------------------

@pytest.mark.criterion(12, "gap splitting n=4, Delta=40, 1e5 trials: failure <= 3/39 + 3 sigma, runs consistent")
def test_c12_gap_splitting():
    rng = np.random.default_rng(12)
    with budget(60):
        rep = G.appc_trials(4, 40, G.make_googol_policy("ordinal", 4), 10**5, rng)
    assert rep.trials == 10**5
    assert rep.failure_rate <= float(F(3, 39)) + 3 * rep.failure_stderr
    assert rep.all_consistent
    for _ in range(200):
        run = G.appc_simulation(4, 40, G.make_googol_policy("never", 4), rng)
        assert run.failed or (run.consistent and min(run.gaps) >= 1)


# 13 ----------------------------------------------------------------------------------------

@pytest.mark.criterion(13, "max guessing: constants score 1; Bayes advantage <= n/Delta, non-increasing")
def test_c13_max_guessing():
    rng = np.random.default_rng(13)
    dists = [build_osi_pairs(31), build_osi_triples(2, 20), point((2, 9, 40)),
             ex.parse_dist("scaled-pairs:4")] + [G.level_construction_dist(3, d) for d in (2, 3, 4)]
    with budget(600):
        for dist in dists:
            assert G.max_guess_eval(dist, G.always_yes) == 1
            assert G.max_guess_eval(dist, G.always_no) == 1
        advs = {}
        for d in (4, 6, 8):
            b = G.level_maxguess_bayes(3, d)
            exact = bayes_single_shot(max_guess_game(G.level_construction_dist(3, d))).value
            assert exact == b.value
            advs[d] = b.advantage
            assert advs[d] <= F(3, d)
        mean, se = G.level_maxguess_bayes(3, 8).monte_carlo(rng, 20000)
    assert advs[4] >= advs[6] >= advs[8]
    assert abs(mean - float(1 + advs[8])) <= 3 * se
    assert mean - 1 <= 3 / 8 + 3 * se
