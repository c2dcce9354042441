"""Tabulate d''(omega) and q(omega) for p = 1..8 and list the threshold speeds.

    python scripts/dprime_table.py --out results/dprime
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from bbmstab.moment import dprime_table, moment_constants, omega_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/dprime")
    ap.add_argument("--p-max", type=int, default=8)
    ap.add_argument("--num", type=int, default=200)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    omegas = np.geomspace(1.001, 10.0, args.num)
    with (out / "dprime.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "omega", "d_second", "q"])
        for p in range(1, args.p_max + 1):
            mc = moment_constants(p, 0.0, 1.0)
            for row in dprime_table(mc, omegas):
                w.writerow([p, *map(repr, row)])

    with (out / "thresholds.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "omega_p", "theta1", "theta2"])
        for p in range(1, args.p_max + 1):
            mc = moment_constants(p, 0.0, 1.0)
            wp = omega_threshold(mc)
            w.writerow([p, "" if wp is None else repr(wp), repr(mc.theta1), repr(mc.theta2)])
            print(f"p={p}: omega_p = {'-' if wp is None else f'{wp:.12f}'}")


if __name__ == "__main__":
    main()
