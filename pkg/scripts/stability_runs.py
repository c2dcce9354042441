"""Perturbed solitary-wave runs: modulated deviation histories for a stable and an unstable case.

    python scripts/stability_runs.py --out results/stability
    BBMSTAB_THREADS=4 python scripts/stability_runs.py --t-end 600

The p = 5 case sits below omega_5, where d'' < 0.
"""

import argparse
import json
from pathlib import Path

from bbmstab.moment import moment_constants, omega_threshold
from bbmstab.nonlinearity import HomogeneousNonlinearity, example1
from bbmstab.profile import WaveProfile
from bbmstab.simulator import (
    InitialCondition,
    SimulationConfig,
    stability_experiment,
    suggested_domain_length,
    write_history_csv,
)


def cases(t_end):
    H1 = example1(1, 1.0, 1.0)
    w1 = WaveProfile(1, 2.0, 2.0, 1.0)
    yield "example1_p1_w2", SimulationConfig(
        H=H1, omega=2.0, mu=1.0, domain_length=suggested_domain_length(w1), dt=0.01, t_end=min(t_end, 100.0),
        sample_every=50, initial=InitialCondition("amplitude", eps=1e-2))
    H5 = HomogeneousNonlinearity.from_terms(5, {7: 1.0 / 7.0})
    for omega, dt in ((1.05, 0.02), (1.5, 0.01)):
        w5 = WaveProfile(5, omega, 1.0)
        for eps in (1e-2, -1e-2):
            yield f"p5_w{omega:g}_eps{eps:+g}", SimulationConfig(
                H=H5, omega=omega, mu=0.0, domain_length=suggested_domain_length(w5), dt=dt, t_end=t_end,
                sample_every=50, initial=InitialCondition("amplitude", eps=eps))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/stability")
    ap.add_argument("--t-end", type=float, default=300.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"omega_5 = {omega_threshold(moment_constants(5, 0.0, 1.0)):.10f}")
    summary = {}
    for name, cfg in cases(args.t_end):
        r, tag = stability_experiment(cfg)
        write_history_csv(r, out / f"{name}.csv")
        growth = float(r.deviation.max() / r.deviation[0])
        summary[name] = {"tag": tag, "max_growth": growth, "drift": r.drift()}
        print(f"{name:24s} {tag:20s} max growth {growth:7.2f}x")
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
