"""Throughput vs frame aggregation at proportional-fair settings.

Writes one CSV per (n, T_on) panel and prints the model-vs-simulation check.

    python scripts/run_fig2.py --out-dir results/fig2 --runs 100 --horizon-s 50
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from coexlab import harness


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out-dir", type=Path, default=Path("results/fig2"))
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--horizon-s", type=float, default=50.0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--rel-tol", type=float, default=0.05)
    args = ap.parse_args(argv)

    spec = replace(harness.builtin("fig2"), runs=args.runs, horizon=args.horizon_s, base_seed=args.seed)
    with harness.executor_from_env() as pool:
        out = harness.run_experiment(spec, executor=pool)
    for path in out.write(args.out_dir):
        print(path)
    results = harness.validate(out, args.rel_tol)
    bad = [v for v in results if not v.passed]
    for v in bad:
        print(f"outside tolerance: {v.key} wifi {v.wifi_err:.4f} lte {v.lte_err:.4f}")
    print(f"{len(results) - len(bad)}/{len(results)} rows within {args.rel_tol}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
