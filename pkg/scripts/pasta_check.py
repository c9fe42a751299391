"""Compare the empirical LTE/WiFi collision rate at LTE starts with the model.

    python scripts/pasta_check.py --n 3 --n-agg 1 --t-on-ms 1 --t-off-ms 5 --horizon-s 80
"""

import argparse
import math

from coexlab.model import Scenario, Scheme, p_lte
from coexlab.phy_timing import WifiTrafficProfile
from coexlab.sim import SimConfig, run


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--n-agg", type=int, default=1)
    ap.add_argument("--t-on-ms", type=float, default=1.0)
    ap.add_argument("--t-off-ms", type=float, default=5.0)
    ap.add_argument("--horizon-s", type=float, default=80.0)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    for scheme in Scheme:
        sc = Scenario(n=args.n, traffic=WifiTrafficProfile(args.n_agg), scheme=scheme,
                      t_on=args.t_on_ms, t_off_mean=args.t_off_ms)
        rep = run(SimConfig(sc, horizon=args.horizon_s, seed=args.seed))
        p = p_lte(sc)
        se = math.sqrt(p * (1 - p) / rep.lte_starts)
        print(f"{scheme.value}: starts={rep.lte_starts} empirical={rep.p_lte_hit:.4f} "
              f"model={p:.4f} z={(rep.p_lte_hit - p) / se:+.2f}")


if __name__ == "__main__":
    main()
