"""Command line entry point: ``cardcomp <group> <command> [options]``.

Every command prints (or writes with ``--out``) result rows as CSV or JSON.
The exit status is 1 when any row carries a failed check, 2 on a bad
configuration or an exceeded enumeration budget.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field

from . import experiments as ex
from .errors import BadParam, BudgetExceeded, ConfigError
from .report import render, write_atomic

__all__ = ["ExperimentConfig", "build_parser", "main", "run"]


@dataclass
class ExperimentConfig:
    group: str
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None
    fmt: str = "csv"
    timing: bool = False

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> ExperimentConfig:
        skip = {"group", "command", "seed", "out", "format", "timing", "func"}
        params = {k: v for k, v in vars(ns).items() if k not in skip}
        return cls(ns.group, ns.command, params, ns.seed, ns.out, ns.format, ns.timing)


def _common(p: argparse.ArgumentParser, seed: bool = False) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write rows to this file (atomically) instead of stdout")
    p.add_argument("--timing", action="store_true", help="add wall-clock runtime to every row")
    p.add_argument("--seed", type=int, default=0,
                   help="seed of the run's random generator (recorded in every row)" if seed
                   else "recorded in every row; this command is deterministic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cardcomp", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    def cmd(group_parsers, name, func, help_, seed=False):
        p = group_parsers.add_parser(name, help=help_)
        p.set_defaults(func=func)
        _common(p, seed)
        return p

    # osi
    g = groups.add_parser("osi", help="order-statistics-indistinguishable constructions")
    sub = g.add_subparsers(dest="command", required=True)
    for name, func, help_, seeded in (("sample", ex.osi_sample, "draw value sets", True),
                                      ("verify", ex.osi_verify, "exact TV maxima", False)):
        p = cmd(sub, name, func, help_, seeded)
        kind = p.add_mutually_exclusive_group()
        kind.add_argument("--pairs", action="store_true")
        kind.add_argument("--triples", action="store_true")
        p.add_argument("--N", type=int, default=101)
        p.add_argument("--lmax", type=int, default=2)
        p.add_argument("--n", type=int, default=3, help="set size of the general construction")
        p.add_argument("--C", default="2")
        p.add_argument("--T1", type=int, default=4)
        if name == "sample":
            p.add_argument("--count", type=int, default=10)

    # universal
    g = groups.add_parser("universal", help="ordinal tasks and the cardinal-to-ordinal simulation")
    sub = g.add_subparsers(dest="command", required=True)
    for name, func, help_ in (("eval", ex.universal_eval, "exact policy values"),
                              ("reduce", ex.universal_reduce, "cardinal vs simulated ordinal value"),
                              ("drift", ex.universal_drift, "per-step simulation drift")):
        p = cmd(sub, name, func, help_)
        p.add_argument("--task", default="secretary", choices=("secretary", "die-guess"))
        p.add_argument("--dist", default="pairs:101",
                       help="pairs:N | triples:LMAX:N | scaled-pairs:M | level:N:DELTA | file.json")

    # rankguess
    g = groups.add_parser("rankguess", help="perturbed rank guessing")
    sub = g.add_subparsers(dest="command", required=True)
    p = cmd(sub, "eval", ex.rankguess_eval, "exact worst-case rewards", seed=True)
    p.add_argument("--policy", default="random", help="random|warmup2|warmup3|mono|exp:L|guess|die|face:C")
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int, default=10**6)
    p.add_argument("--instances", default="any", help="'any' for random instances, or a JSON file")
    p.add_argument("--count", type=int, default=20)
    p = cmd(sub, "trace", ex.rankguess_trace, "per-deletion adversary breakdown")
    p.add_argument("--policy", default="mono")
    p.add_argument("--values", required=True, help="comma-separated sorted values")
    p.add_argument("--N", type=int, default=10**6)

    # googol
    g = groups.add_parser("googol", help="level chain, level secretary, gap-splitting simulation")
    sub = g.add_subparsers(dest="command", required=True)
    p = cmd(sub, "chain", ex.googol_chain, "transition matrix and stationary vector")
    p.add_argument("--n", type=int, default=4)
    p = cmd(sub, "dp", ex.googol_dp, "ordinal vs level secretary backward induction")
    p.add_argument("--n", type=int, default=4)
    p = cmd(sub, "sim", ex.googol_sim, "Monte-Carlo gap-splitting runs", seed=True)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--delta", type=int, default=40)
    p.add_argument("--policy", default="ordinal", help="ordinal | never | first | value:Q")
    p.add_argument("--trials", type=int, default=10**5)
    p = cmd(sub, "maxguess", ex.googol_maxguess, "Bayes max-guessing on the level construction", seed=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--delta", type=int, default=8)
    p.add_argument("--constant", action="store_true", help="also evaluate constant yes/no exactly")
    p.add_argument("--trials", type=int, default=0, help="Monte-Carlo check of the Bayes answer")

    # oracle
    g = groups.add_parser("oracle", help="Bayes-optimal ground truth")
    sub = g.add_subparsers(dest="command", required=True)
    p = cmd(sub, "singleshot", ex.oracle_singleshot, "single-shot guessing value")
    p.add_argument("--game", choices=("die", "max"), default="die")
    p.add_argument("--dist", default="scaled-pairs:4")
    p = cmd(sub, "secretary", ex.oracle_secretary, "optimal online secretary value")
    p.add_argument("--dist", default="pairs:101")

    # suites
    g = groups.add_parser("suite", help="bundled acceptance checks")
    sub = g.add_subparsers(dest="command", required=True)
    cmd(sub, "paper-exact", ex.suite_exact, "exact reproductions")
    p = cmd(sub, "properties", ex.suite_properties, "randomised bound checks", seed=True)
    p.add_argument("--trials", type=int, default=100)
    p = cmd(sub, "montecarlo", ex.suite_montecarlo, "sampling checks with standard errors", seed=True)
    p.add_argument("--trials", type=int, default=10**5)
    return parser


def run(ns: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_namespace(ns)
    start = time.perf_counter()
    rows = ns.func(ns)
    elapsed = (time.perf_counter() - start) * 1000
    for r in rows:
        r.seed = cfg.seed
        if cfg.timing:
            r.runtime_ms = elapsed
    text = render(rows, cfg.fmt)
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    return 1 if any(r.passed is False for r in rows) else 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return run(ns)
    except (ConfigError, BudgetExceeded, BadParam) as exc:
        print(f"cardcomp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
