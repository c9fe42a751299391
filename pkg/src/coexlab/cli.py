"""Command line: ``coexlab {model,propfair,simulate,experiment,validate}``."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import harness
from .model import InvalidRegimeError, Scenario, Scheme, analyze, AnalyticReport
from .phy_timing import PhyProfile, WifiTrafficProfile
from .propfair import PropFairResult, solve_toff
from .sim import SimConfig, derive_seed, metrics, run, summarize


def _scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=[s.value for s in Scheme], default="csat")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--tau", type=float, default=1 / 16)
    p.add_argument("--n-agg", type=int, default=1)
    p.add_argument("--payload", type=int, default=12000, help="MPDU payload bits")
    p.add_argument("--t-on-ms", type=float, default=10.0)
    p.add_argument("--t-off-ms", type=float, default=None)
    p.add_argument("--propfair", action="store_true", help="use the proportional-fair mean off time")
    p.add_argument("--t-lte-ms", type=float, default=1.0)
    p.add_argument("--lte-rate", type=float, default=None, help="LTE rate, Mb/s (default: PHY rate)")
    p.add_argument("--phy", type=Path, default=None, help="key=value PHY parameter file")


def _scenario(args) -> Scenario:
    phy = PhyProfile.from_file(args.phy) if args.phy else PhyProfile()
    sc = Scenario(
        n=args.n, tau=args.tau, traffic=WifiTrafficProfile(args.n_agg, args.payload), phy=phy,
        scheme=Scheme(args.scheme), t_on=args.t_on_ms,
        t_off_mean=args.t_off_ms if args.t_off_ms is not None else args.t_on_ms,
        t_lte=args.t_lte_ms, lte_rate=args.lte_rate,
    )
    if args.propfair:
        sc = replace(sc, t_off_mean=solve_toff(sc).t_off_star / 1000.0)
    return sc


def _print_csv(columns, rows, header=True, out=None) -> None:
    w = csv.DictWriter(out or sys.stdout, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    if header:
        w.writeheader()
    w.writerows(rows)


def cmd_model(args) -> int:
    sc = _scenario(args)
    try:
        report = analyze(sc)
    except InvalidRegimeError as exc:
        print(f"invalid regime: {exc}", file=sys.stderr)
        return 2
    _print_csv(AnalyticReport.CSV_COLUMNS, [report.csv_row(sc)], header=not args.no_header)
    return 0


def cmd_propfair(args) -> int:
    res = solve_toff(_scenario(args))
    _print_csv(PropFairResult.CSV_COLUMNS, [res.csv_row()], header=args.header)
    return 0


SIM_COLUMNS = ("run", "seed", "s_wifi_mbps", "s_lte_mbps", "lte_airtime", "p_lte_hit",
               "realized_off_ms", "mean_delay_ms", "wifi_success", "wifi_collisions",
               "lte_wifi_collisions", "lte_starts")


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    base = SimConfig(sc, horizon=args.horizon_s, seed=args.seed)
    rows, per_run, delays = [], [], []
    for r in range(args.runs):
        seed = derive_seed(args.seed, r)
        rep = run(replace(base, seed=seed))
        m = metrics(rep)
        per_run.append(m)
        if args.delays:
            delays.append(rep.delay_samples)
        rows.append({
            "run": r, "seed": seed,
            "s_wifi_mbps": m["s_wifi"] / 1e6, "s_lte_mbps": m["s_lte"] / 1e6,
            "lte_airtime": m["lte_airtime"], "p_lte_hit": m["p_lte_hit"],
            "realized_off_ms": m["realized_off_mean"] / 1000.0,
            "mean_delay_ms": m["mean_delay"] / 1000.0,
            "wifi_success": sum(rep.wifi_success_count),
            "wifi_collisions": rep.wifi_collision_count,
            "lte_wifi_collisions": rep.lte_wifi_collision_count,
            "lte_starts": rep.lte_starts,
        })
    summary = summarize(per_run)
    mean = summary.mean
    agg = {
        "run": "mean", "seed": args.seed,
        "s_wifi_mbps": mean["s_wifi"] / 1e6, "s_lte_mbps": mean["s_lte"] / 1e6,
        "lte_airtime": mean["lte_airtime"], "p_lte_hit": mean["p_lte_hit"],
        "realized_off_ms": mean["realized_off_mean"] / 1000.0,
        "mean_delay_ms": mean["mean_delay"] / 1000.0,
        **{k: sum(r[k] for r in rows) for k in ("wifi_success", "wifi_collisions",
                                                  "lte_wifi_collisions", "lte_starts")},
    }
    rows.append(agg)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            _print_csv(SIM_COLUMNS, rows, out=fh)
    else:
        _print_csv(SIM_COLUMNS, rows)
    if args.delays:
        samples = np.concatenate(delays) if delays else np.empty(0)
        np.savetxt(args.delays, samples, fmt="%.3f")
    return 0


def cmd_experiment(args) -> int:
    spec = harness.resolve(args.name)
    overrides = {}
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.horizon_s is not None:
        overrides["horizon"] = args.horizon_s
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    spec = replace(spec, **overrides)
    with harness.executor_from_env() as pool:
        if spec.name == "fig3":
            output = harness.delay_cdfs(spec, executor=pool)
        else:
            output = harness.run_experiment(spec, executor=pool)
    for path in output.write(args.out_dir):
        print(path)
    if args.rel_tol is not None and output.columns == harness.COLUMNS:
        return _report(harness.validate(output, args.rel_tol))
    return 0


def _report(results) -> int:
    failed = 0
    for v in results:
        status = "PASS" if v.passed else "FAIL"
        failed += not v.passed
        print(f"{status} n={v.key[0]} t_on={v.key[1]} n_agg={v.key[2]} {v.key[3]}: "
              f"wifi {v.wifi_err:.4f} lte {v.lte_err:.4f}")
    print(f"{len(results) - failed}/{len(results)} rows within tolerance")
    return 1 if failed else 0


def cmd_validate(args) -> int:
    rows = []
    for path in args.files:
        rows.extend(harness.read_rows(path))
    return _report(harness.validate(rows, args.rel_tol))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coexlab", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    m = sub.add_parser("model", help="evaluate the analytic throughput model")
    _scenario_args(m)
    m.add_argument("--no-header", action="store_true")
    m.set_defaults(func=cmd_model)

    pf = sub.add_parser("propfair", help="proportional-fair mean off time")
    _scenario_args(pf)
    pf.add_argument("--header", action="store_true")
    pf.set_defaults(func=cmd_propfair)

    s = sub.add_parser("simulate", help="run simulation replications")
    _scenario_args(s)
    s.add_argument("--horizon-s", type=float, default=50.0)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--out", type=Path, default=None)
    s.add_argument("--delays", type=Path, default=None)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("experiment", help="run a built-in (fig2, fig3) or file-defined sweep")
    e.add_argument("name")
    e.add_argument("--out-dir", type=Path, default=Path("results"))
    e.add_argument("--runs", type=int, default=None)
    e.add_argument("--horizon-s", type=float, default=None)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--rel-tol", type=float, default=None, help="also validate at this tolerance")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("validate", help="check model-vs-simulation agreement in experiment CSVs")
    v.add_argument("files", nargs="+", type=Path)
    v.add_argument("--rel-tol", type=float, default=0.05)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
