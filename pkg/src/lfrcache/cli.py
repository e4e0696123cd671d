"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 infeasible
configuration.  JSON output is written with sorted keys so identical flags
and seeds give byte-identical results.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .analysis import curve_csv, curve_svg, sweep_curve, theorem_load, uniform_grid, variant_load
from .errors import CapacityError, ConfigurationError, DomainError
from .model import SystemConfig, format_rational, parse_rational, random_instance
from .schemes import VARIANTS, make_plan, minimal_symbols, place, deliver
from .verify import (
    end_to_end_suite,
    worked_example_report,
    feasible_grid,
    instance_dump,
    peer_residue_exhaustive,
    minrank_fixed_placement,
    replay_dump,
    run_trial,
    tiny_minrank_instances,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3

SUITES = {
    # (K range, points per K, trials, fields, rank oracle)
    "quick": (range(2, 9), 12, 6, (2, 3, 7), True),
    "full": (range(2, 11), 30, 20, (2, 3, 7), False),
}


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path and path != "-":
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_curve(args) -> int:
    if args.mu_list is not None:
        grid = args.mu_list
    else:
        grid = uniform_grid(args.grid)
    try:
        points = sweep_curve(args.users, args.lam, grid)
    except DomainError as exc:
        return _fail(EXIT_USAGE, str(exc))
    _emit(curve_csv(points), args.out)
    if args.svg:
        title = f"K={args.users}, lambda={format_rational(args.lam)}"
        Path(args.svg).write_text(curve_svg(points, title))
    return EXIT_OK


def _simulate_plan(args):
    K, mu, lam = args.users, args.mu, args.lam
    variant = args.variant
    if variant == "auto":
        variant = theorem_load(K, mu, lam).chosen_variant
    plan = make_plan(K, mu, lam, variant, g=args.g)
    F = args.scale * minimal_symbols(K, mu, lam, plan)
    return plan, SystemConfig.from_fractions(K, mu, lam, args.field, F)


def cmd_simulate(args) -> int:
    if args.scale < 1:
        return _fail(EXIT_USAGE, "--scale must be at least 1")
    try:
        plan, config = _simulate_plan(args)
        library, demands = random_instance(config, args.seed)
        outcome, _, transcript = run_trial(plan, config, library, demands)
    except (ConfigurationError, DomainError) as exc:
        return _fail(EXIT_INFEASIBLE, f"infeasible configuration: {exc}")
    predicted = variant_load(config.K, config.mu, config.lam, plan)
    point = theorem_load(config.K, config.mu, config.lam)
    summary = {
        "config": config.to_dict(),
        "variant": plan.variant,
        "g": plan.g,
        "seed": args.seed,
        "symbols_transmitted": transcript.length,
        "predicted_symbols": format_rational(predicted * config.F),
        "predicted_load": format_rational(predicted),
        "achievable_variant": point.chosen_variant,
        "achievable_load": format_rational(point.rho_proposed),
        "segments": [
            {"label": s.label, "length": len(s)} for s in transcript.segments
        ],
        "decoded": {str(k + 1): ok for k, ok in enumerate(outcome.decoded)},
        "oracle": {str(k + 1): ok for k, ok in enumerate(outcome.oracle)},
        "consistent": outcome.consistent,
    }
    ok = outcome.passed and outcome.oracle == outcome.decoded and transcript.length == predicted * config.F
    summary["pass"] = ok
    if args.dump:
        dump = instance_dump(config, plan, args.seed, library, demands, transcript)
        Path(args.dump).write_text(_dumps(dump))
    _emit(_dumps(summary), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    started = time.perf_counter()
    if args.replay:
        try:
            dump = json.loads(Path(args.replay).read_text())
            result = replay_dump(dump)
        except (OSError, ValueError, KeyError, ConfigurationError) as exc:
            result = {"pass": False, "error": f"{type(exc).__name__}: {exc}"}
        report = {"replay": result, "pass": result["pass"]}
    else:
        ks, points, trials, fields, oracle = SUITES[args.suite]
        if args.trials is not None:
            trials = args.trials
        configs = []
        for q in fields:
            for K in ks:
                for mu, lam, F in feasible_grid(K, points):
                    configs.append(SystemConfig.from_fractions(K, mu, lam, q, F))
        suite = end_to_end_suite(configs, trials, args.seed, oracle=oracle)
        residues = peer_residue_exhaustive(args.kmax)
        example = worked_example_report(seed=args.seed)
        probes = tiny_minrank_instances(10 if args.suite == "quick" else 50, args.seed)
        failures = [c for c in suite["cases"] if not c["pass"]]
        report = {
            "suite": args.suite,
            "seed": args.seed,
            "trials": trials,
            "end_to_end": {
                "cases": len(suite["cases"]),
                "failed": len(failures),
                "failures": failures,
                "pass": suite["pass"],
            },
            "peer_residues": {**residues.to_dict(), "pass": residues.ok},
            "worked_example": example,
            "minrank": {
                "instances": len(probes),
                "failed": [p for p in probes if not p["pass"]],
                "pass": all(p["pass"] for p in probes),
            },
        }
        report["pass"] = all(report[k]["pass"] for k in ("end_to_end", "peer_residues", "worked_example", "minrank"))
    text = _dumps(report)
    path = args.report
    if not report["pass"] and not path:
        path = "verify-report.json"
    if path:
        Path(path).write_text(text)
    summary = {k: v["pass"] for k, v in report.items() if isinstance(v, dict) and "pass" in v}
    summary["pass"] = report["pass"]
    if path:
        summary["report"] = path
    sys.stdout.write(_dumps(summary))
    print(f"elapsed {time.perf_counter() - started:.1f}s", file=sys.stderr)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _sum_text(parts: list[str]) -> str:
    return parts[0] if len(parts) == 1 else " + ".join(parts[:-1]) + " = " + parts[-1]


def cmd_example1(args) -> int:
    report = worked_example_report(tuple(args.symbols), q=args.field, seed=args.seed)
    if args.json:
        sys.stdout.write(_dumps(report))
    else:
        print(
            f"K={report['K']} mu={report['mu']} lambda={report['lambda']}  "
            f"rho={report['rho_proposed']}  baseline={report['rho_baseline']}"
        )
        print(f"{'F':>5} {'variant':<17} {'symbols':>7}  {'expected':<22} {'measured':<22} decoded")
        for r in report["rows"]:
            print(
                f"{r['F']:>5} {r['variant']:<17} {r['symbols']:>7}  "
                f"{_sum_text(r['expected']):<22} {_sum_text(r['measured']):<22} {r['decoded']}/{report['K']}"
            )
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_minrank(args) -> int:
    try:
        plan, config = _simulate_plan(args)
        library, demands = random_instance(config, args.seed)
        cache = place(plan, config, library)
        transcript = deliver(plan, config, demands, library)
        value = minrank_fixed_placement(cache.placements, list(demands), limit=args.limit)
    except (ConfigurationError, DomainError, CapacityError) as exc:
        return _fail(EXIT_INFEASIBLE, f"infeasible configuration: {exc}")
    out = {
        "config": config.to_dict(),
        "variant": plan.variant,
        "seed": args.seed,
        "minrank": value,
        "transcript_length": transcript.length,
        "pass": value <= transcript.length,
    }
    sys.stdout.write(_dumps(out))
    return EXIT_OK if out["pass"] else EXIT_FAIL


def _instance_flags(p: argparse.ArgumentParser, scale_default: int = 1) -> None:
    p.add_argument("--users", "-K", type=int, required=True)
    p.add_argument("--mu", type=_rational, required=True, help="normalized cache size p/q")
    p.add_argument("--lambda", dest="lam", type=_rational, required=True, help="L/F as p/q")
    p.add_argument("--field", type=int, default=2, help="prime field order q")
    p.add_argument("--variant", choices=("auto",) + VARIANTS, default="auto")
    p.add_argument("--g", type=int, default=None, help="group count for the corner variant")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=int, default=scale_default, help="F = scale x minimal F")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lfrcache", description="Linear function retrieval with coded caching.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="memory-load tradeoff as CSV")
    p.add_argument("--users", "-K", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=_rational, required=True)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--grid", type=int, help="number of uniform mu points in [0, 1]")
    grid.add_argument("--mu-list", type=_rational_list, help="comma-separated p/q values")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument("--svg", default=None, help="also write an SVG chart here")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("simulate", help="place, deliver and decode one random instance")
    _instance_flags(p)
    p.add_argument("--dump", default=None, help="write a replayable JSON instance")
    p.add_argument("--out", default=None, help="summary path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("--suite", choices=sorted(SUITES), default="quick")
    p.add_argument("--kmax", type=int, default=24, help="largest K for the exhaustive group check")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None, help="full JSON report path")
    p.add_argument("--replay", default=None, help="re-decode a dump written by simulate --dump")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("example1", help="K=6, mu=47/72, lambda=1/12 with both two-part solutions")
    p.add_argument("--symbols", type=int, nargs="+", default=[72, 144])
    p.add_argument("--field", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_example1)

    p = sub.add_parser("minrank", help="brute-force minrank for a tiny instance's placement")
    _instance_flags(p)
    p.add_argument("--limit", type=int, default=1 << 16, help="maximum number of side-information tuples")
    p.set_defaults(func=cmd_minrank)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "kmax", 2) < 2:
        parser.error("--kmax must be at least 2")
    if getattr(args, "grid", None) is not None and args.grid < 1:
        parser.error("--grid must be positive")
    if getattr(args, "users", 1) < 1:
        parser.error("--users must be positive")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
