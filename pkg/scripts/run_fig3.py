"""MAC delay CDFs for one station with 64-frame aggregation.

    python scripts/run_fig3.py --out-dir results/fig3
"""

import argparse
from dataclasses import replace
from pathlib import Path

import numpy as np

from coexlab import harness


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out-dir", type=Path, default=Path("results/fig3"))
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--horizon-s", type=float, default=50.0)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    spec = replace(harness.builtin("fig3"), runs=args.runs, horizon=args.horizon_s, base_seed=args.seed)
    with harness.executor_from_env() as pool:
        out = harness.delay_cdfs(spec, executor=pool)
    for path in out.write(args.out_dir):
        print(path)

    # fraction of packets delivered within one LTE on period
    for key, rows in out.groups().items():
        t_on, scheme = key
        delay = np.array([r["delay_ms"] for r in rows])
        cdf = np.array([r["cdf"] for r in rows])
        frac = cdf[np.searchsorted(delay, t_on, side="right") - 1]
        print(f"T_on={t_on:g} ms {scheme}: P(delay <= T_on) = {frac:.3f}")


if __name__ == "__main__":
    main()
