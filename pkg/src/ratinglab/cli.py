"""Command-line front end.

Subcommands: verify (property checks), chain (skill-chain builder), maxgain
(best-opponent search), simulate (two-arm attack experiment), plot (render
figures from emitted CSVs).  Output files land in --out, which defaults to
the RATINGLAB_OUT environment variable and then the current directory.

Exit codes: 0 success / all requested properties hold; 1 a property was
refuted (or a data file could not be parsed); 2 usage or config error;
3 a check was inconclusive.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import configio, plots, verifier
from .core import k_value
from .curves import eval_sigma
from .sim import run_replicates, strategic_advantage
from .verifier import Grid, Verdict

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


class UsageError(Exception):
    pass


def _out_dir(args) -> str:
    out = args.out or os.environ.get("RATINGLAB_OUT") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _parse_grid(text: str) -> Grid:
    try:
        lo, hi, step = (float(part) for part in text.split(":"))
        return Grid(lo, hi, step)
    except ValueError as exc:
        raise UsageError(f"bad grid spec {text!r} (want lo:hi:step): {exc}") from None


def _load_system(path: str):
    try:
        return configio.load_system(path)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed system config {path}: {exc}") from None


VERIFY_PROPS = ["draw_free", "fairness", "oi", "p_oi", "strong_oi", "strong_p_oi",
                "p_separable", "p_constant_k", "translation_invariance",
                "bisector_linear", "characterization"]


def cmd_verify(args) -> int:
    system = _load_system(args.system)
    grid = _parse_grid(args.grid)
    tol = args.tol if args.tol is not None else verifier.default_tolerance(system.curve)
    props = [p.strip() for p in args.props.split(",") if p.strip()]
    if not props:
        raise UsageError("no properties requested (use --props)")
    bad = [p for p in props if p not in VERIFY_PROPS]
    if bad:
        raise UsageError(f"unknown properties {bad}; choose from {VERIFY_PROPS}")
    out = _out_dir(args)
    reports = []
    for prop in props:
        if prop == "draw_free":
            rep = verifier.check_draw_free(system.curve, grid, tol)
        elif prop == "fairness":
            rep = verifier.check_fairness(system, grid, tol)
        elif prop == "oi":
            rep = verifier.check_opponent_indifference(system, grid, tol)
        elif prop == "p_oi":
            rep = verifier.check_p_opponent_indifference(system, args.p, grid, tol,
                                                         mode=args.mode)
        elif prop == "strong_oi":
            rep = verifier.check_strong_oi(system, grid, tol)
        elif prop == "strong_p_oi":
            rep = verifier.check_strong_oi(system, grid, tol, margin=args.p,
                                           mode=args.mode)
        elif prop == "p_separable":
            rep, table = verifier.check_p_separable(system.curve, args.p, grid, tol)
            configio.write_json({"xs": table.xs.tolist(), "values": table.values.tolist(),
                                 "reference": table.reference},
                                os.path.join(out, "verify_bisector.json"))
        elif prop == "p_constant_k":
            rep = verifier.check_p_constant_k(system, args.p, grid, tol)
        elif prop == "translation_invariance":
            rep = verifier.check_translation_invariance(system.curve, grid, tol)
        elif prop == "bisector_linear":
            _, table = verifier.check_p_separable(system.curve, args.p, grid, tol)
            rep = verifier.check_bisector_linear(table, grid, tol)
        else:  # characterization
            rep = verifier.cross_check_characterization(system, args.p, grid, tol,
                                                        mode=args.mode)
        configio.write_report(rep, os.path.join(out, f"verify_{prop}.json"))
        print(rep.one_line())
        reports.append(rep)
    if any(r.verdict is Verdict.REFUTED for r in reports):
        return EXIT_REFUTED
    if any(r.verdict is Verdict.INCONCLUSIVE for r in reports):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_chain(args) -> int:
    system = _load_system(args.system)
    if not 0.5 < args.p < 1.0:
        raise UsageError("--p must lie strictly between 0.5 and 1")
    ceiling = args.ceiling if args.ceiling is not None else args.r1 + 1000.0 * args.budget
    chain = verifier.build_skill_chain(system.curve, args.p, args.r1, args.budget, ceiling)
    out = _out_dir(args)
    configio.write_chain_csv(chain, os.path.join(out, "chain.csv"))
    tol = args.tol if args.tol is not None else verifier.default_tolerance(system.curve)
    identity = verifier.verify_chain_identity(system.curve, chain, tol)
    configio.write_report(identity, os.path.join(out, "chain_identity.json"))
    scale = verifier.full_scale_report(chain, args.budget)
    configio.write_report(scale, os.path.join(out, "full_scale.json"))
    print(f"indifference chain bound floor(2p/(2p-1)) = {chain.length_bound}, "
          f"achieved length = {len(chain.ratings)} ({chain.terminated_reason})")
    print(identity.one_line())
    return EXIT_OK


def cmd_maxgain(args) -> int:
    system = _load_system(args.system)
    if not args.lo < args.hi:
        raise UsageError("--lo must be below --hi")
    ys = args.lo + args.resolution * np.arange(
        int((args.hi - args.lo) / args.resolution + 1e-9) + 1)
    gammas = k_value(system.k, args.x, ys) * (
        eval_sigma(system.curve, args.x_star, ys) - eval_sigma(system.curve, args.x, ys))
    out = _out_dir(args)
    configio.write_gain_csv(ys, gammas, os.path.join(out, "gain.csv"))
    best = verifier.find_max_gain_opponent(system, args.x, args.x_star,
                                           (args.lo, args.hi), args.resolution)
    if best is None:
        print("indifferent: expected gain is flat over the search interval")
    else:
        print(f"max-gain opponent rating: {best:.6f}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        plan = configio.load_simulation_plan(args.config)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed experiment config {args.config}: {exc}") from None
    out = _out_dir(args)
    strategic = run_replicates(plan.config, plan.seeds, n_jobs=args.jobs)
    baseline_config = dataclasses.replace(plan.config,
                                          attacker_strategy=plan.baseline_strategy)
    baseline = run_replicates(baseline_config, plan.seeds, n_jobs=args.jobs)
    for res in strategic:
        configio.write_attacker_csv(res, os.path.join(out, f"strategic_seed{res.seed}.csv"))
    for res in baseline:
        configio.write_attacker_csv(res, os.path.join(out, f"baseline_seed{res.seed}.csv"))
    delta, (ci_lo, ci_hi) = strategic_advantage(strategic, baseline)
    summary = {
        "delta": delta,
        "ci95": [ci_lo, ci_hi],
        "seeds": list(plan.seeds),
        "strategic_final_half_means": [r.final_half_mean for r in strategic],
        "baseline_final_half_means": [r.final_half_mean for r in baseline],
        "rounds_skipped_strategic": [r.rounds_skipped for r in strategic],
        "rounds_skipped_baseline": [r.rounds_skipped for r in baseline],
    }
    configio.write_json(summary, os.path.join(out, "summary.json"))
    print(f"strategic advantage: {delta:+.3f} rating points, 95% CI [{ci_lo:+.3f}, {ci_hi:+.3f}]")
    return EXIT_OK


def cmd_plot(args) -> int:
    out = _out_dir(args)
    if args.kind == "curve":
        if not args.system:
            raise UsageError("plot curve needs --system")
        system = _load_system(args.system)
        diffs, sigmas = plots.sample_curve(system.curve, anchor=args.anchor,
                                           span=args.span)
        configio.write_csv(os.path.join(out, "curve.csv"), ["diff", "sigma"],
                           zip(diffs, sigmas))
        path = plots.plot_curve(diffs, sigmas, os.path.join(out, "curve.svg"))
    elif args.kind == "trajectory":
        if not args.input:
            raise UsageError("plot trajectory needs --input (a simulate CSV)")
        try:
            cols = configio.read_csv_columns(args.input, configio.ATTACKER_CSV_HEADER)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_REFUTED
        path = plots.plot_trajectory(cols["round"], cols["attacker_current"],
                                     cols["attacker_true"],
                                     os.path.join(out, "trajectory.svg"))
    else:  # gain
        if not args.input:
            raise UsageError("plot gain needs --input (a maxgain CSV)")
        try:
            cols = configio.read_csv_columns(args.input, ["y", "gamma"])
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_REFUTED
        path = plots.plot_gain(cols["y"], cols["gamma"], os.path.join(out, "gain.svg"))
    print(f"wrote {path}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ratinglab",
                                     description="Rating-system laboratory")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("verify", help="run property checks on a rating system")
    p.add_argument("--system", required=True, help="system config JSON")
    p.add_argument("--props", required=True,
                   help="comma-separated properties: " + ",".join(VERIFY_PROPS))
    p.add_argument("--grid", default="1000:2000:50", help="lo:hi:step rating grid")
    p.add_argument("--p", type=float, default=0.4, help="P margin for P-restricted checks")
    p.add_argument("--tol", type=float, default=None, help="residual tolerance")
    p.add_argument("--mode", choices=["extreme_pair", "pairwise"], default="extreme_pair")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("chain", help="build a skill chain and check its span identity")
    p.add_argument("--system", required=True)
    p.add_argument("--p", type=float, required=True, help="per-link win probability, in (0.5, 1)")
    p.add_argument("--r1", type=float, default=0.0, help="starting rating")
    p.add_argument("--budget", type=int, default=50, help="maximum chain length")
    p.add_argument("--ceiling", type=float, default=None, help="search ceiling rating")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("maxgain", help="find the opponent rating maximizing |expected gain|")
    p.add_argument("--system", required=True)
    p.add_argument("--x", type=float, required=True, help="current rating")
    p.add_argument("--x-star", dest="x_star", type=float, required=True, help="true rating")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_maxgain)

    p = sub.add_parser("simulate", help="run the two-arm opponent-selection experiment")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--jobs", type=int, default=1, help="parallel replicates")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot", help="render figures from emitted CSVs")
    p.add_argument("kind", choices=["curve", "trajectory", "gain"])
    p.add_argument("--system", default=None, help="system config (curve plots)")
    p.add_argument("--input", default=None, help="input CSV (trajectory/gain plots)")
    p.add_argument("--anchor", type=float, default=0.0)
    p.add_argument("--span", type=float, default=800.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
