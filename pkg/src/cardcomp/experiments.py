"""Experiment bodies behind the command line.  Each returns a list of :class:`ResultRow`."""
from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from . import googol, oracle, osi, rankguess, universal
from .distkit import FiniteDist, tv_distance, uniform
from .errors import ConfigError
from .report import ResultRow, check_row, data_row, estimate_row, exact_row

REFERENCE_STATIONARY_4 = tuple(Fraction(x) for x in ("5/66", "6/66", "7/66", "2/11", "5/22", "7/22"))
REFERENCE_ROW_4123 = tuple(Fraction(x) for x in ("0", "1/3", "0", "2/3", "0", "0"))

# A Fibonacci-like gap vector whose merged gaps fool the level-1 Exp-Gaps rule.
EXP_LEVEL1_COUNTEREXAMPLE = ((1, 90, 217, 435), 500)


# Distribution specs -----------------------------------------------------------

def parse_dist(text: str) -> FiniteDist:
    """``pairs:N``, ``triples:LMAX:N``, ``scaled-pairs:M``, ``level:N:DELTA`` or a JSON file path."""
    kind, _, rest = text.partition(":")
    try:
        args = [int(x) for x in rest.split(":")] if rest else []
    except ValueError as exc:
        raise ConfigError(f"bad distribution spec {text!r}") from exc
    if kind == "pairs" and len(args) == 1:
        return osi.build_osi_pairs(args[0])
    if kind == "triples" and len(args) == 2:
        return osi.build_osi_triples(args[0], args[1])
    if kind == "scaled-pairs" and len(args) == 1:
        return uniform((20 * i, 20 * i + 20) for i in range(1, args[0] + 1))
    if kind == "level" and len(args) == 2:
        return googol.level_construction_dist(args[0], args[1])
    if not rest:
        try:
            with open(text, encoding="utf-8") as fh:
                return FiniteDist.from_json(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read distribution file {text!r}: {exc}") from exc
    raise ConfigError(f"unknown distribution spec {text!r}")


def make_task(name: str, n: int) -> universal.OrdinalTask:
    if name == "secretary":
        return universal.secretary_task(n)
    if name == "die-guess":
        return universal.die_guess_task(n)
    raise ConfigError(f"unknown task {name!r} (secretary or die-guess)")


# osi ---------------------------------------------------------------------------

def _osi_dist(args) -> tuple[FiniteDist | None, dict, osi.GeneralOsi | None]:
    if args.pairs:
        return osi.build_osi_pairs(args.N), {"construction": "pairs", "N": args.N}, None
    if args.triples:
        return (osi.build_osi_triples(args.lmax, args.N),
                {"construction": "triples", "lmax": args.lmax, "N": args.N}, None)
    params = osi.OsiParams(args.n, Fraction(args.C), args.T1)
    g = osi.build_osi_general(params)
    echo = {"construction": "general", "n": args.n, "C": args.C, "T1": args.T1}
    return (g.value_dist() if g.exact else None), echo, g


def osi_sample(args) -> list[ResultRow]:
    rng = np.random.default_rng(args.seed)
    F, echo, g = _osi_dist(args)
    if g is not None:
        draws = [osi.gaps_to_values(x) for x in g.sample(rng, args.count)]
    else:
        draws = F.sample(rng, args.count)
    return [data_row("osi.sample", list(s), echo) for s in draws]


def osi_verify(args) -> list[ResultRow]:
    F, echo, _ = _osi_dist(args)
    if F is None:
        raise ConfigError("construction too large to enumerate; raise CARDCOMP_BUDGET")
    rep = osi.verify_osi(F)
    rows = [
        exact_row("osi.max_deletion_tv", rep.max_deletion_tv, echo, detail=list(rep.deletion_argmax)),
        exact_row("osi.max_subset_tv", rep.max_subset_tv, echo,
                  detail=[list(rep.subset_argmax[0]), list(rep.subset_argmax[1])]),
        check_row("osi.amplification", rep.amplification_ok, echo),
    ]
    if args.pairs:
        rows.append(check_row("osi.pairs_is_1_over_N_minus_1",
                              rep.max_deletion_tv == Fraction(1, args.N - 1), echo))
    return rows


# universal ---------------------------------------------------------------------

def universal_eval(args) -> list[ResultRow]:
    F = parse_dist(args.dist)
    n = len(next(iter(F)))
    task = make_task(args.task, n)
    echo = {"task": args.task, "dist": args.dist, "n": n}
    rows = [exact_row("universal.offline_optimum", universal.offline_optimum(task), echo)]
    triv = universal.trivial_ordinal_policy(task)
    rows.append(exact_row("universal.trivial_ordinal", universal.evaluate_ordinal(task, triv), echo))
    if args.task == "secretary":
        bayes = oracle.bayes_secretary(F)
        rows.append(exact_row("universal.cardinal_bayes",
                              universal.evaluate_cardinal(task, bayes.policy, F), echo))
        rows.append(exact_row("universal.ordinal_optimum", googol.ordinal_secretary_dp(n).value, echo))
    return rows


def universal_reduce(args) -> list[ResultRow]:
    F = parse_dist(args.dist)
    n = len(next(iter(F)))
    if args.task != "secretary":
        raise ConfigError("reduce uses the Bayes secretary policy; task must be secretary")
    task = universal.secretary_task(n)
    echo = {"task": args.task, "dist": args.dist, "n": n}
    bayes = oracle.bayes_secretary(F)
    card = universal.evaluate_cardinal(task, bayes.policy, F)
    sim = universal.evaluate_ordinal(task, universal.ordinalize(task, bayes.policy, F))
    delta = osi.verify_osi(F).max_subset_tv
    bound = n * delta
    return [
        exact_row("universal.cardinal", card, echo),
        exact_row("universal.ordinalized", sim, echo),
        exact_row("universal.gap", card - sim, echo),
        exact_row("universal.gap_bound", bound, echo, passed=card - sim <= bound),
    ]


def universal_drift(args) -> list[ResultRow]:
    F = parse_dist(args.dist)
    n = len(next(iter(F)))
    task = make_task(args.task, n)
    rep = universal.simulation_drift(task, F)
    echo = {"task": args.task, "dist": args.dist, "n": n}
    rows = [exact_row("universal.drift", d, dict(echo, k=k), detail={"failure": rep.failure[k - 1]})
            for k, d in enumerate(rep.drift, start=1)]
    rows.append(exact_row("universal.delta", rep.delta, echo))
    rows.append(check_row("universal.drift_within_bound", rep.within_bound, echo))
    return rows


# rankguess -----------------------------------------------------------------------

def _load_instances(args, rng) -> list[tuple[tuple[int, ...], int]]:
    if args.instances in ("any", "random"):
        if args.n is None:
            raise ConfigError("--n is required with random instances")
        return [rankguess.random_instance(args.n, rng, vmax=args.N) for _ in range(args.count)]
    try:
        with open(args.instances, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read instances from {args.instances!r}: {exc}") from exc
    try:
        items = raw["instances"] if isinstance(raw, dict) else raw
        N = int(raw.get("N", args.N)) if isinstance(raw, dict) else args.N
        return [(tuple(int(v) for v in s), N) for s in items]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"expected a list of value lists or {{'N', 'instances'}} in {args.instances!r}") from exc


def rankguess_eval(args) -> list[ResultRow]:
    rng = np.random.default_rng(args.seed)
    policy = rankguess.make_policy(args.policy)
    rows = []
    for values, N in _load_instances(args, rng):
        inst = rankguess.RankGuessInstance(values, N)
        v = rankguess.worst_case_expected_reward(inst, policy)
        rows.append(exact_row("rankguess.reward", v, {"policy": args.policy, "N": N, "values": list(values)}))
    return rows


def rankguess_trace(args) -> list[ResultRow]:
    values = tuple(int(x) for x in args.values.split(","))
    inst = rankguess.RankGuessInstance(values, args.N)
    policy = rankguess.make_policy(args.policy)
    echo = {"policy": args.policy, "N": args.N, "values": list(values)}
    rows = []
    for case in rankguess.worst_case_breakdown(inst, policy):
        rows.append(exact_row("rankguess.min_prob", case.min_prob, dict(echo, index=case.index),
                              detail={"shift": list(case.worst_shift), "observed": list(case.worst_observed)}))
    rows.append(exact_row("rankguess.reward", rankguess.worst_case_expected_reward(inst, policy), echo))
    return rows


# googol -------------------------------------------------------------------------

def googol_chain(args) -> list[ResultRow]:
    chain = googol.build_transition_matrix(args.n)
    p = googol.stationary_distribution(chain)
    rows = []
    for rho, row, w in zip(chain.states, chain.matrix, p):
        rows.append(exact_row("googol.stationary", w, {"n": args.n, "state": "".join(map(str, rho))},
                              detail={"transition_row": list(row)}))
    if args.n == 4:
        rows.append(check_row("googol.stationary_matches_example", tuple(p) == REFERENCE_STATIONARY_4, {"n": 4}))
        rows.append(check_row("googol.row_4123_matches_example",
                              tuple(chain.row((4, 1, 2, 3))) == REFERENCE_ROW_4123, {"n": 4}))
    return rows


def googol_dp(args) -> list[ResultRow]:
    rep = googol.level_secretary_dp(args.n)
    echo = {"n": args.n}
    return [
        exact_row("googol.ordinal_value", rep.ordinal.value, echo),
        exact_row("googol.level_value", rep.value, echo),
        check_row("googol.g_equals_f", not rep.mismatches, dict(echo, states=rep.states)),
        check_row("googol.accept_prob_i_over_n", not rep.accept_mismatches, echo),
        check_row("googol.history_induced", rep.history_induced, echo),
    ]


def googol_sim(args) -> list[ResultRow]:
    rng = np.random.default_rng(args.seed)
    policy = googol.make_googol_policy(args.policy, args.n)
    rep = googol.appc_trials(args.n, args.delta, policy, args.trials, rng)
    echo = {"n": args.n, "delta": args.delta, "policy": args.policy, "trials": args.trials}
    return [
        estimate_row("googol.failure_rate", rep.failure_rate, rep.failure_stderr, echo,
                     passed=rep.within_bound, detail={"bound": rep.bound}),
        estimate_row("googol.win_rate", rep.win_rate, rep.win_stderr, echo),
        check_row("googol.gaps_consistent", rep.all_consistent, echo),
    ]


def googol_maxguess(args) -> list[ResultRow]:
    n, delta = args.n, args.delta
    echo = {"n": n, "delta": delta}
    bayes = googol.level_maxguess_bayes(n, delta)
    rows = [
        exact_row("googol.maxguess_bayes", bayes.value, echo),
        exact_row("googol.maxguess_advantage", bayes.advantage, echo,
                  passed=bayes.advantage <= Fraction(n, delta), detail={"bound": Fraction(n, delta)}),
    ]
    if args.constant:
        F = googol.level_construction_dist(n, delta)
        for name, pol in (("yes", googol.always_yes), ("no", googol.always_no)):
            v = googol.max_guess_eval(F, pol)
            rows.append(exact_row(f"googol.maxguess_constant_{name}", v, echo, passed=v == 1))
    if args.trials:
        rng = np.random.default_rng(args.seed)
        est, se = bayes.monte_carlo(rng, args.trials)
        ok = abs(est - float(bayes.value)) <= 3 * se + 1e-12
        rows.append(estimate_row("googol.maxguess_bayes_mc", est, se, dict(echo, trials=args.trials), passed=ok))
    return rows


# oracle --------------------------------------------------------------------------

def oracle_singleshot(args) -> list[ResultRow]:
    F = parse_dist(args.dist)
    game = oracle.die_guess_game(F) if args.game == "die" else oracle.max_guess_game(F)
    res = oracle.bayes_single_shot(game)
    return [exact_row("oracle.singleshot", res.value, {"game": args.game, "dist": args.dist})]


def oracle_secretary(args) -> list[ResultRow]:
    F = parse_dist(args.dist)
    res = oracle.bayes_secretary(F)
    echo = {"dist": args.dist, "n": res.n}
    ordv = googol.ordinal_secretary_dp(res.n).value
    return [exact_row("oracle.secretary", res.value, echo),
            exact_row("oracle.ordinal_optimum", ordv, echo, passed=res.value >= ordv)]


# Suites ----------------------------------------------------------------------------

def suite_exact(args=None) -> list[ResultRow]:
    rows: list[ResultRow] = []
    chain = googol.build_transition_matrix(4)
    p = googol.stationary_distribution(chain)
    rows.append(check_row("stationary_vector_n4", tuple(p) == REFERENCE_STATIONARY_4))
    rows.append(check_row("transition_row_4123", tuple(chain.row((4, 1, 2, 3))) == REFERENCE_ROW_4123))
    for n in (3, 4, 5):
        rows.append(check_row("deletion_identities", googol.verify_deletion_identities(n).passed, {"n": n}))
    for n, expect in ((3, Fraction(1, 2)), (4, Fraction(11, 24)), (5, None)):
        rep = googol.level_secretary_dp(n)
        ok = rep.equal and (expect is None or rep.value == expect)
        rows.append(exact_row("level_dp_value", rep.value, {"n": n}, passed=ok))
    warm = rankguess.make_policy("warmup2")
    ok = True
    for s1 in range(1, 101):
        for s2 in range(s1 + 20, 101):
            v = rankguess.worst_case_expected_reward(rankguess.RankGuessInstance((s1, s2), 100), warm)
            ok = ok and v == 1 + Fraction(s2 - s1 - 2, 100) and v >= Fraction(118, 100)
    rows.append(check_row("warmup2_closed_form", ok, {"N": 100}))
    for N in (21, 101, 1001):
        tv = osi.verify_osi(osi.build_osi_pairs(N)).max_deletion_tv
        rows.append(exact_row("osi_pairs_tv", tv, {"N": N}, passed=tv == Fraction(1, N - 1)))
    tvs = [osi.verify_osi(osi.build_osi_triples(lm, 8 * 2 ** (lm + 1))).max_subset_tv for lm in range(1, 6)]
    rows.append(check_row("osi_triples_monotone", all(a >= b for a, b in zip(tvs, tvs[1:])),
                          {"density": 8}, detail=tvs))
    F = osi.build_osi_pairs(101)
    task = universal.secretary_task(2)
    bayes = oracle.bayes_secretary(F)
    gap = (universal.evaluate_cardinal(task, bayes.policy, F)
           - universal.evaluate_ordinal(task, universal.ordinalize(task, bayes.policy, F)))
    drift = universal.simulation_drift(task, F)
    rows.append(exact_row("universal_gap", gap, {"N": 101},
                          passed=gap <= Fraction(2, 100) and drift.drift[1] <= Fraction(1, 100)))
    v = oracle.bayes_single_shot(oracle.die_guess_game(parse_dist("scaled-pairs:4"))).value
    rows.append(exact_row("oracle_scaled_pairs", v, {"m": 4}, passed=v == Fraction(5, 4)))
    F3 = googol.level_construction_dist(3, 4)
    ok = all(googol.max_guess_eval(G, pol) == 1 for G in (F3, F)
             for pol in (googol.always_yes, googol.always_no))
    rows.append(check_row("maxguess_constant_is_1", ok))
    advs = [googol.level_maxguess_bayes(3, d).advantage for d in (4, 6, 8)]
    ok = all(a <= Fraction(3, d) for a, d in zip(advs, (4, 6, 8))) and advs[0] >= advs[1] >= advs[2]
    rows.append(check_row("maxguess_bayes_advantage", ok, detail=advs))
    return rows


def suite_properties(args) -> list[ResultRow]:
    rng = np.random.default_rng(args.seed)
    trials = args.trials
    rows: list[ResultRow] = []
    oblivious = [rankguess.RandomPolicy(),
                 rankguess.ConstantPolicy(FiniteDist({1: Fraction(1, 2), 2: Fraction(1, 2)}))]
    for n in range(4, 8):
        ok = True
        for _ in range(trials):
            inst = rankguess.RankGuessInstance(*rankguess.random_instance(n, rng))
            ok = ok and all(rankguess.worst_case_expected_reward(inst, pol) == 1 for pol in oblivious)
        rows.append(check_row("value_oblivious_is_1", ok, {"n": n, "trials": trials}))
    mono = rankguess.MonoGapsPolicy()
    for n in range(4, 8):
        ok = True
        for _ in range(trials):
            vals, N = rankguess.random_instance(n, rng)
            v = rankguess.worst_case_expected_reward(rankguess.RankGuessInstance(vals, N), mono)
            d = rankguess.diffs(vals)
            strong = rankguess.is_strictly_monotone(d) is None or rankguess.fibonacci_violated(d)
            ok = ok and v >= 1 and (not strong or v >= 1 + Fraction(1, 3 * (n - 3)))
        rows.append(check_row("mono_gaps_bound", ok, {"n": n, "trials": trials}))
    for level in range(2, 7):
        pol = rankguess.ExpGapsPolicy(level)
        ok = True
        for n in (4, 5, 6):
            for dec in (False, True):
                for satisfy in (False, True):
                    for _ in range(max(1, trials // 20)):
                        vals, N = rankguess.level_instance(n, level, rng, satisfy=satisfy, decreasing=dec)
                        v = rankguess.worst_case_expected_reward(rankguess.RankGuessInstance(vals, N), pol)
                        need = 1 if satisfy else 1 + Fraction(n - 3, n * (n - 1))
                        ok = ok and v >= need
        rows.append(check_row("exp_gaps_bound", ok, {"level": level}))
    vals, N = EXP_LEVEL1_COUNTEREXAMPLE
    v = rankguess.worst_case_expected_reward(rankguess.RankGuessInstance(vals, N), rankguess.ExpGapsPolicy(1))
    rows.append(exact_row("exp_gaps_level1_counterexample", v, {"values": list(vals), "N": N},
                          detail="known deviation: reward below 1 on a Fibonacci-like instance"))
    for n in (3, 4, 5, 6):
        F = googol.level_distribution(n)
        lam = F
        ok = True
        for k in range(n, 1, -1):
            u = googol.uniform_delete(lam, "U")
            v_ = googol.uniform_delete(lam, "V")
            dk = lam.map(lambda x, k=k: googol.delete_level(x, k))
            mix = FiniteDist({o: Fraction(1, k) * dk.prob(o) + Fraction(k - 1, k) * v_.prob(o)
                              for o in set(dk) | set(v_)})
            ok = ok and tv_distance(u, mix) == 0
            lam = v_
        rows.append(check_row("u_is_mixture_of_dk_and_v", ok, {"n": n}))
    return rows


def suite_montecarlo(args) -> list[ResultRow]:
    ss = np.random.SeedSequence(args.seed)
    r1, r2, r3 = (np.random.default_rng(s) for s in ss.spawn(3))
    trials = args.trials
    rows: list[ResultRow] = []
    rep = googol.appc_trials(4, 40, googol.make_googol_policy("ordinal", 4), trials, r1)
    rows.append(estimate_row("appc_failure_rate", rep.failure_rate, rep.failure_stderr,
                             {"n": 4, "delta": 40, "trials": trials},
                             passed=rep.within_bound and rep.all_consistent, detail={"bound": rep.bound}))
    F = googol.level_distribution(4)
    lv = googol.sample_levels(4, r2, trials)
    for rho, p in F.items():
        freq = float(np.all(lv == np.array(rho), axis=1).mean())
        se = math.sqrt(float(p) * (1 - float(p)) / trials)
        rows.append(estimate_row("level_frequency", freq, se, {"state": "".join(map(str, rho))},
                                 passed=abs(freq - float(p)) <= 3 * se, detail={"p": p}))
    bayes = googol.level_maxguess_bayes(3, 8)
    m = max(1000, trials // 10)
    est, se = bayes.monte_carlo(r3, m)
    rows.append(estimate_row("maxguess_bayes_delta8", est, se, {"n": 3, "delta": 8, "trials": m},
                             passed=abs(est - float(bayes.value)) <= 3 * se and est - 1 <= 3 / 8 + 3 * se,
                             detail={"exact": bayes.value}))
    return rows
