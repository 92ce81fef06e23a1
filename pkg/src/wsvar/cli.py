"""Command-line front end.

Subcommands: variation, wiener, profile, decide, witness, check-inequality.
Scenarios live in TOML files (keys: lambda, q, delta, p, horizon,
scan_budget, seed); command-line flags override file values.  Every command
writes machine-readable JSON even on failure.

Exit codes: 0 success (decide: evidence_included; witness: levels found),
1 negative result (evidence_excluded / witness not found / inequality
violated), 2 parse or validation failure, 3 search budget exceeded,
4 inconclusive verdict, 5 internal chain violation.
"""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from . import _format, _kernels
from .criterion import (DEFAULT_SCAN_BUDGET, check_rearrangement_inequality,
                        decide_inclusion, VERDICT_EXCLUDED, VERDICT_INCLUDED,
                        limsup_profile)
from .errors import (BudgetExceeded, ChainViolation, WitnessNotFound,
                     WsvarError)
from .seqspec import ReciprocalSums, validate_spec
from .stepfn import StepFunction
from .variation import lambda_p_variation
from .wiener import wiener_variation
from .witness import (cross_check_witness_small, build_witness,
                      find_witness_levels, verify_witness_norm,
                      verify_witness_variation_lowerbound)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_INCONCLUSIVE = 4
EXIT_CHAIN = 5


@dataclass
class Scenario:
    lambda_: str = "i"
    q: str = "n"
    delta: str = "2^n"
    p: float = 1.0
    horizon: int = 32
    scan_budget: int = DEFAULT_SCAN_BUDGET
    seed: int = 0

    def to_dict(self):
        return {"lambda": self.lambda_, "q": self.q, "delta": self.delta,
                "p": self.p, "horizon": self.horizon,
                "scan_budget": self.scan_budget, "seed": self.seed}


def load_scenario(args):
    sc = Scenario()
    if args.scenario:
        raw = tomllib.loads(Path(args.scenario).read_text())
        sc.lambda_ = raw.get("lambda", sc.lambda_)
        sc.q = raw.get("q", sc.q)
        sc.delta = raw.get("delta", sc.delta)
        sc.p = float(raw.get("p", sc.p))
        sc.horizon = int(raw.get("horizon", sc.horizon))
        sc.scan_budget = int(raw.get("scan_budget", sc.scan_budget))
        sc.seed = int(raw.get("seed", sc.seed))
    for name, attr in (("lam", "lambda_"), ("q", "q"), ("delta", "delta")):
        v = getattr(args, name, None)
        if v is not None:
            setattr(sc, attr, v)
    if getattr(args, "p", None) is not None:
        sc.p = args.p
    if getattr(args, "horizon", None) is not None:
        sc.horizon = args.horizon
    if getattr(args, "scan_budget", None) is not None:
        sc.scan_budget = args.scan_budget
    if getattr(args, "seed", None) is not None:
        sc.seed = args.seed
    if sc.p < 1:
        raise WsvarError(f"p must be >= 1, got {sc.p}")
    return sc


def build_context(sc, validation_horizon=None):
    horizon = max(sc.horizon, validation_horizon or 0, 64)
    lam_spec = validate_spec(sc.lambda_, "lambda", horizon)
    q_spec = validate_spec(sc.q, "q", horizon)
    delta_spec = validate_spec(sc.delta, "delta", horizon)
    return ReciprocalSums(lam_spec), q_spec, delta_spec


def _emit(args, name, payload, csv_rows=None):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.format in ("json", "both"):
        _format.write_json(out / f"{name}.json", payload)
    if csv_rows is not None and args.format in ("csv", "both"):
        _format.write_csv(out / f"{name}.csv", csv_rows)


def _report(sc, command, result):
    return {"command": command, "scenario": sc.to_dict(),
            "backend": _kernels.backend(), "result": result}


def cmd_variation(args):
    sc = load_scenario(args)
    try:
        f = StepFunction.from_json(Path(args.function).read_text())
        lams, _, _ = build_context(sc)
    except (WsvarError, ValueError, KeyError, OSError) as exc:
        _emit(args, "variation", {"error": str(exc)})
        return EXIT_PARSE
    try:
        report = lambda_p_variation(f, lams, sc.p, budget=args.budget)
    except BudgetExceeded as exc:
        _emit(args, "variation", _report(sc, "variation", exc.report.to_dict()))
        return EXIT_BUDGET
    _emit(args, "variation", _report(sc, "variation", report.to_dict()))
    return EXIT_OK


def cmd_wiener(args):
    sc = load_scenario(args)
    try:
        f = StepFunction.from_json(Path(args.function).read_text())
        lams, q_spec, delta_spec = build_context(sc)
        report = wiener_variation(f, q_spec, delta_spec, sc.horizon)
    except (WsvarError, ValueError, KeyError, OSError) as exc:
        _emit(args, "wiener", {"error": str(exc)})
        return EXIT_PARSE
    _emit(args, "wiener", _report(sc, "wiener", report.to_dict()),
          csv_rows=report.csv_rows())
    return EXIT_OK


def cmd_profile(args):
    sc = load_scenario(args)
    try:
        lams, q_spec, delta_spec = build_context(sc)
        profile = limsup_profile(lams, sc.p, q_spec, delta_spec,
                                 range(1, sc.horizon + 1), sc.scan_budget)
    except (WsvarError, ValueError) as exc:
        _emit(args, "profile", {"error": str(exc)})
        return EXIT_PARSE
    _emit(args, "profile", _report(sc, "profile", profile.to_dict()),
          csv_rows=profile.csv_rows())
    return EXIT_OK


def cmd_decide(args):
    sc = load_scenario(args)
    try:
        lams, q_spec, delta_spec = build_context(sc)
        report = decide_inclusion(lams, sc.p, q_spec, delta_spec,
                                  range(1, sc.horizon + 1),
                                  bound_factor=args.bound_factor,
                                  slope_threshold=args.slope_threshold,
                                  scan_budget=sc.scan_budget)
    except (WsvarError, ValueError) as exc:
        _emit(args, "decide", {"error": str(exc)})
        return EXIT_PARSE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _format.write_json(out / "decide.json", _report(sc, "decide", report.to_dict()))
    _format.write_csv(out / "profile.csv", report.profile.csv_rows())
    if report.verdict == VERDICT_INCLUDED:
        return EXIT_OK
    if report.verdict == VERDICT_EXCLUDED:
        return EXIT_NEGATIVE
    return EXIT_INCONCLUSIVE


def cmd_witness(args):
    sc = load_scenario(args)
    try:
        lams, q_spec, delta_spec = build_context(
            sc, validation_horizon=args.n_search_limit)
    except (WsvarError, ValueError) as exc:
        _emit(args, "witness", {"error": str(exc)})
        return EXIT_PARSE
    try:
        params = find_witness_levels(lams, sc.p, q_spec, delta_spec,
                                     args.levels, args.n_search_limit,
                                     sc.scan_budget)
    except WitnessNotFound as exc:
        _emit(args, "witness", _report(sc, "witness", {
            "found": False, "level": exc.level,
            "n_search_limit": exc.n_search_limit,
            "note": "no admissible level: evidence the indicator is bounded"}))
        return EXIT_NEGATIVE
    try:
        norm = verify_witness_norm(params, lams)
        bounds = [verify_witness_variation_lowerbound(params, lams, lv.k)
                  for lv in params.levels]
        cross = cross_check_witness_small(params, lams, q_spec, delta_spec)
    except ChainViolation as exc:
        _emit(args, "witness", _report(sc, "witness", {
            "found": True, "params": params.to_dict(),
            "chain_violation": str(exc)}))
        return EXIT_CHAIN
    result = {"found": True,
              "params": params.to_dict(),
              "comb": build_witness(params).to_dict(),
              "norm_chain": norm.to_dict(),
              "lower_bounds": [b[0] for b in bounds],
              "cross_check": cross.to_dict()}
    _emit(args, "witness", _report(sc, "witness", result))
    return EXIT_OK


def cmd_check_inequality(args):
    sc = load_scenario(args)
    try:
        x = [float(v) for v in args.x.split(",") if v.strip()]
        y = [float(v) for v in args.y.split(",") if v.strip()]
        lhs, rhs, holds = check_rearrangement_inequality(x, y, args.exponent)
    except (WsvarError, ValueError) as exc:
        _emit(args, "check-inequality", {"error": str(exc)})
        return EXIT_PARSE
    _emit(args, "check-inequality", _report(sc, "check-inequality", {
        "x": x, "y": y, "exponent": args.exponent,
        "lhs": lhs, "rhs": rhs, "holds": holds}))
    return EXIT_OK if holds else EXIT_NEGATIVE


def _add_common(sub):
    sub.add_argument("--scenario", help="TOML scenario file")
    sub.add_argument("--out", default=".", help="output directory")
    sub.add_argument("--lam", "--lambda", dest="lam", help="lambda(i) expression")
    sub.add_argument("--q", help="q(n) expression")
    sub.add_argument("--delta", help="delta(n) expression")
    sub.add_argument("--p", type=float)
    sub.add_argument("--horizon", type=int)
    sub.add_argument("--scan-budget", type=int, dest="scan_budget")
    sub.add_argument("--seed", type=int)
    fmt = sub.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const",
                     const="json", default="both")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")


def make_parser():
    parser = argparse.ArgumentParser(
        prog="wsvar",
        description="weighted and length-constrained variation toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("variation", help="weighted p-variation of a step function")
    _add_common(s)
    s.add_argument("--function", required=True, help="StepFunction JSON file")
    s.add_argument("--budget", type=int, default=1_000_000)
    s.set_defaults(func=cmd_variation)

    s = subs.add_parser("wiener", help="length-constrained variation")
    _add_common(s)
    s.add_argument("--function", required=True)
    s.set_defaults(func=cmd_wiener)

    s = subs.add_parser("profile", help="indicator rows over n")
    _add_common(s)
    s.set_defaults(func=cmd_profile)

    s = subs.add_parser("decide", help="inclusion evidence verdict")
    _add_common(s)
    s.add_argument("--bound-factor", type=float, default=2.0)
    s.add_argument("--slope-threshold", type=float, default=0.05)
    s.set_defaults(func=cmd_decide)

    s = subs.add_parser("witness", help="construct and verify a comb witness")
    _add_common(s)
    s.add_argument("--levels", "-K", type=int, default=3)
    s.add_argument("--n-search-limit", type=int, default=200)
    s.set_defaults(func=cmd_witness)

    s = subs.add_parser("check-inequality", help="rank-weighted sum inequality")
    _add_common(s)
    s.add_argument("--x", required=True, help="comma-separated, nonincreasing")
    s.add_argument("--y", required=True, help="comma-separated, nonincreasing")
    s.add_argument("--exponent", type=float, required=True)
    s.set_defaults(func=cmd_check_inequality)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except WsvarError as exc:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _format.write_json(out / f"{args.command}.json", {"error": str(exc)})
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
