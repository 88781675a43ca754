"""Command-line surface: classify / simulate / oracle over scenario files.

All three commands read the line-oriented scenario format of `netalign.dag`
and print one JSON report to stdout.  Output is deterministic: same file,
same flags, same seed -> byte-identical bytes.  Exit codes: 0 ok, 2 bad
input, 3 resample limit hit, 4 graph too large for the symbolic oracle.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Dict, Optional

from . import __version__
from .dag import ModelViolationError, Scenario, ScenarioParseError, load_scenario
from .feasibility import (
    CouplingReport,
    NetworkType,
    classify,
    cross_check_verdicts,
    report_identity_flags,
)
from .gf2m import field
from .pbna import build_plan, simulate
from .xfer import (
    COUPLING_IDENTITIES,
    ResampleLimitError,
    TooLargeError,
    oracle_identity_verdict,
    oracle_session_polys,
)

SEED_ENV = "NETALIGN_SEED"


def _resolve_seed(flag_value: Optional[int]) -> int:
    """Flag wins; else the NETALIGN_SEED environment variable; else 0."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ScenarioParseError(f"{SEED_ENV} must be an integer, got {env!r}")


def _scenario_digest(sc: Scenario) -> Dict:
    return {
        "nodes": len(sc.nodes),
        "edges": len(sc.edges),
        "sessions": [[s.sender, s.receiver] for s in sc.sessions],
        "sigma": [sc.sigma(i) for i in (1, 2, 3)],
        "tau": [sc.tau(i) for i in (1, 2, 3)],
    }


def _classification_fields(report: CouplingReport, nt: NetworkType) -> Dict:
    out = {
        "connectivity": [[report.connectivity[(j, i)] for i in (1, 2, 3)]
                         for j in (1, 2, 3)],
        "type": nt.kind,
        "optimal_rate": str(nt.optimal_rate),
        "eta_is_one": report.eta_is_one,
        "half_feasible": nt.half_feasible,
    }
    for i in (1, 2, 3):
        pos = report.p_is_one[i - 1] if report.p_is_one is not None else None
        pet = report.p_is_eta[i - 1] if report.p_is_eta is not None else None
        thr = report.third_relation[i - 1] if report.third_relation is not None else None
        out[f"p{i}_is_one"] = pos
        out[f"p{i}_is_eta"] = pet
        out[f"third_relation_{i}"] = thr
    return out


def cmd_classify(args) -> int:
    sc = load_scenario(args.scenario)
    seed = _resolve_seed(args.seed)
    report, nt = classify(sc, field_bits=args.field_bits, trials=args.trials,
                          seed=seed)
    doc = {
        "command": "classify",
        "version": __version__,
        "seed": seed,
        "field_bits": args.field_bits,
        "scenario": _scenario_digest(sc),
    }
    doc.update(_classification_fields(report, nt))
    if args.cross_check:
        graph_flags = report_identity_flags(report) if report.fully_connected else {}
        checks = {}
        for name, verdict in cross_check_verdicts(sc, field_bits=args.field_bits,
                                                  trials=args.trials,
                                                  seed=seed).items():
            graph = graph_flags.get(name)
            checks[name] = {
                "randomized": verdict.all_equal,
                "graph": graph,
                "agrees": None if graph is None else graph == verdict.all_equal,
                "trials": verdict.trials,
                "degree_bound": verdict.degree_bound,
                "false_accept_bound": verdict.false_accept_bound,
            }
        doc["cross_check"] = checks
    _emit(doc)
    return 0


def cmd_simulate(args) -> int:
    sc = load_scenario(args.scenario)
    seed = _resolve_seed(args.seed)
    report, nt = classify(sc, seed=seed)
    plan = build_plan(nt, n=args.n)
    result = simulate(sc, plan, args.trials, field(args.field_bits), seed=seed)
    doc = {
        "command": "simulate",
        "version": __version__,
        "seed": seed,
        "field_bits": args.field_bits,
        "scenario": _scenario_digest(sc),
        "plan": {
            "kind": plan.kind,
            "n": plan.n,
            "slots": plan.N,
            "symbols": list(plan.k),
        },
        "trials": result.trials,
        "successes": result.successes,
        "success_probability": result.success_probability,
        "receiver_failures": list(result.receiver_failures),
        "rates": [str(r) for r in result.rates],
    }
    doc.update(_classification_fields(report, nt))
    _emit(doc)
    return 0


def cmd_oracle(args) -> int:
    sc = load_scenario(args.scenario)
    polys = oracle_session_polys(sc)
    doc = {
        "command": "oracle",
        "version": __version__,
        "scenario": _scenario_digest(sc),
        "monomials": {f"m{j}{i}": len(polys[(j, i)]) for j in (1, 2, 3)
                      for i in (1, 2, 3)},
        "identities": {name: oracle_identity_verdict(name, polys)
                       for name in COUPLING_IDENTITIES},
    }
    _emit(doc)
    return 0


def _emit(doc: Dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netalign",
        description="Classify three-session coded networks and simulate "
                    "the matching precoding scheme.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cls = sub.add_parser("classify", help="graph-theoretic rate verdict")
    p_cls.add_argument("scenario", help="scenario file")
    p_cls.add_argument("--field-bits", type=int, default=32,
                       help="GF(2^m) size for randomized checks (default 32)")
    p_cls.add_argument("--trials", type=int, default=20,
                       help="random points per identity test (default 20)")
    p_cls.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (default ${SEED_ENV} or 0)")
    p_cls.add_argument("--cross-check", action="store_true",
                       help="also test every coupling identity at random points")
    p_cls.set_defaults(func=cmd_classify)

    p_sim = sub.add_parser("simulate", help="end-to-end scheme simulation")
    p_sim.add_argument("scenario", help="scenario file")
    p_sim.add_argument("--n", type=int, default=1,
                       help="extension parameter for the 2n+1-slot scheme (default 1)")
    p_sim.add_argument("--trials", type=int, default=500,
                       help="Monte-Carlo trials (default 500)")
    p_sim.add_argument("--field-bits", type=int, default=16,
                       help="GF(2^m) symbol size (default 16)")
    p_sim.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (default ${SEED_ENV} or 0)")
    p_sim.set_defaults(func=cmd_simulate)

    p_orc = sub.add_parser("oracle", help="exact symbolic transfer-function report")
    p_orc.add_argument("scenario", help="scenario file")
    p_orc.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioParseError, ModelViolationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResampleLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
