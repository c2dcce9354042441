"""Lowest L2 eigenvalue as det M sweeps through 1/(p+1), numeric against the exact ladder.

    python scripts/spectrum_sweep.py --p 1 2 5 --omega 2.0
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from bbmstab.spectral import analytic_L2_eigenvalues, l2_positivity_threshold, numeric_spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, nargs="+", default=[1, 2, 5])
    ap.add_argument("--omega", type=float, default=2.0)
    ap.add_argument("--num", type=int, default=41)
    ap.add_argument("--out", default="results/spectrum")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with (out / "l2_sweep.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "omega", "detM", "numeric_least", "exact_least"])
        for p in args.p:
            b = l2_positivity_threshold(p)
            for det in np.linspace(b - 0.2, b + 0.2, args.num):
                num = numeric_spectrum(det, p, args.omega, k=1)[0]
                exact = analytic_L2_eigenvalues(p, args.omega, det)
                w.writerow([p, args.omega, repr(det), repr(num), repr(exact[0]) if exact else ""])
            print(f"p={p}: threshold 1/(p+1) = {b:.6f}")


if __name__ == "__main__":
    main()
