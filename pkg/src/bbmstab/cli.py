"""Command-line front end.

    bbmstab analyze  --input problem.json
    bbmstab spectrum --input problem.json --out results/
    bbmstab dprime   --input problem.json
    bbmstab simulate --input problem.json --out run/
    bbmstab example 2

The problem is one JSON document (a file, or stdin when --input is omitted or
"-").  Reports go to stdout unless --quiet, and into --out when given.
Errors are a JSON object on stderr with a nonzero exit code.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from scipy import optimize

from . import criterion, moment, schema, simulator, spectral
from .nonlinearity import (
    ContinuumOfRatios,
    EmptySpectrumOfRoots,
    HomogeneousNonlinearity,
    ProportionalRatio,
    example1,
    example2,
    example3,
    example4,
    find_ratios,
    make_ratio,
)

EXIT_OK = 0
EXIT_MODULE = 1
EXIT_SCHEMA = 2
EXIT_NO_RATIO = 3
EXIT_GOLDEN = 4

log = logging.getLogger("bbmstab")


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


@dataclass(frozen=True)
class Problem:
    H: HomogeneousNonlinearity
    mu: float | None
    omegas: tuple[float, ...]
    grid: spectral.DiscretizationParams
    k: int
    sim: dict | None


# --------------------------------------------------------------------------
# ingestion


def parse_omega(value) -> tuple[float, ...]:
    if value is None:
        return ()
    if isinstance(value, (int, float)):
        return (float(value),)
    if isinstance(value, list):
        return tuple(float(w) for w in value)
    if value.get("spacing", "linear") == "log":
        ws = np.geomspace(value["start"], value["stop"], value["num"])
    else:
        ws = np.linspace(value["start"], value["stop"], value["num"])
    return tuple(float(w) for w in ws)


def load_problem(doc: dict) -> Problem:
    try:
        schema.validate_problem(doc)
    except jsonschema.ValidationError as exc:
        raise CliError(EXIT_SCHEMA, "SchemaError", exc.message) from None
    g = dict(doc.get("grid", {}))
    k = int(g.pop("k", 6))
    try:
        H = HomogeneousNonlinearity(doc["p"], tuple(float(c) for c in doc["coeffs"]))
        grid = spectral.DiscretizationParams(**g)
    except ValueError as exc:
        raise CliError(EXIT_SCHEMA, "SchemaError", str(exc)) from None
    return Problem(H=H, mu=doc.get("mu"), omegas=parse_omega(doc.get("omega")), grid=grid, k=k,
                   sim=doc.get("sim"))


def read_input(path: str | None) -> dict:
    try:
        text = sys.stdin.read() if path in (None, "-") else Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_SCHEMA, "InputError", str(exc)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_SCHEMA, "SchemaError", f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise CliError(EXIT_SCHEMA, "SchemaError", "top level must be a JSON object")
    return doc


def ratios_for(H: HomogeneousNonlinearity, mu: float | None) -> list[ProportionalRatio]:
    try:
        if mu is not None:
            return [make_ratio(H, mu)]
        return find_ratios(H)
    except ContinuumOfRatios as exc:
        raise CliError(EXIT_NO_RATIO, "ContinuumOfRatios", str(exc)) from None
    except EmptySpectrumOfRoots as exc:
        raise CliError(EXIT_NO_RATIO, "EmptySpectrumOfRoots", str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_NO_RATIO, "NotAProportionalRatio", str(exc)) from None


def admissible_ratios(H: HomogeneousNonlinearity, mu: float | None) -> list[ProportionalRatio]:
    good = [r for r in ratios_for(H, mu) if r.admissible]
    if not good:
        raise CliError(EXIT_NO_RATIO, "NotAdmissible", "no ratio mu has H_u(1, mu) > 0")
    return good


def need_omega(pb: Problem) -> tuple[float, ...]:
    if not pb.omegas:
        raise CliError(EXIT_SCHEMA, "SchemaError", "this subcommand needs 'omega'")
    return pb.omegas


# --------------------------------------------------------------------------
# commands; each returns a JSON-ready dict (or CSV text for dprime)


def ratio_entry(H: HomogeneousNonlinearity, r: ProportionalRatio) -> dict:
    entry = {"mu": r.mu, "hu": r.hu, "admissible": r.admissible}
    if not r.admissible:
        entry["verdict"] = criterion.VerdictKind.NOT_ADMISSIBLE.value
        return entry
    M = criterion.build_M(H, r)
    omega_p = None
    if H.p > 4 and M.det < criterion.stability_bound(H.p):
        omega_p = moment.omega_threshold(moment.moment_constants(H.p, r.mu, r.hu))
    v = criterion.verdict(M, H.p, omega_p)
    entry.update(M=M.entries, detM=M.det, eigvals=list(M.eigvals), orthogonal=M.orthogonal,
                 verdict=v.kind.value, bound=v.bound, omega_p=v.omega_p)
    return entry


def cmd_analyze(pb: Problem) -> dict:
    rs = ratios_for(pb.H, pb.mu)
    entries = [ratio_entry(pb.H, r) for r in rs]
    if not any(e["admissible"] for e in entries):
        raise CliError(EXIT_NO_RATIO, "NotAdmissible", "no ratio mu has H_u(1, mu) > 0")
    return {"kind": "analysis", "p": pb.H.p, "coeffs": list(pb.H.coeffs), "continuum_of_ratios": False,
            "ratios": entries}


def cmd_spectrum(pb: Problem) -> dict:
    reports = []
    for r in admissible_ratios(pb.H, pb.mu):
        for w in need_omega(pb):
            reports.append(spectral.linearized_report(pb.H, r, w, pb.grid, k=pb.k).to_dict())
    return {"kind": "spectrum", "reports": reports}


def cmd_dprime(pb: Problem) -> str:
    lines = ["mu,omega,d_second,q"]
    for r in admissible_ratios(pb.H, pb.mu):
        mc = moment.moment_constants(pb.H.p, r.mu, r.hu)
        for w, d2, q in moment.dprime_table(mc, need_omega(pb)):
            lines.append(",".join(repr(float(v)) for v in (r.mu, w, d2, q)))
    return "\n".join(lines) + "\n"


def sim_config(pb: Problem, r: ProportionalRatio, omega: float) -> simulator.SimulationConfig:
    s = dict(pb.sim or {})
    snaps = tuple(s.pop("snapshot_times", ()))
    if "domain_length" not in s:
        wave = simulator.WaveProfile(pb.H.p, omega, r.hu, r.mu)
        s["domain_length"] = simulator.suggested_domain_length(wave)
    try:
        init = simulator.InitialCondition(**s.pop("initial", {"kind": "exact"}))
        return simulator.SimulationConfig(H=pb.H, omega=omega, mu=r.mu, initial=init, checkpoint_times=snaps, **s)
    except ValueError as exc:
        raise CliError(EXIT_SCHEMA, "SchemaError", str(exc)) from None


def cmd_simulate(pb: Problem, out: Path | None) -> dict:
    if pb.sim is None:
        raise CliError(EXIT_SCHEMA, "SchemaError", "simulate needs a 'sim' block")
    omegas = need_omega(pb)
    if len(omegas) != 1:
        raise CliError(EXIT_SCHEMA, "SchemaError", "simulate needs a single omega")
    r = admissible_ratios(pb.H, pb.mu)[0]
    cfg = sim_config(pb, r, omegas[0])
    run = simulator.run(cfg)
    tag = "n/a" if cfg.initial.kind == "exact" or run.deviation[0] == 0.0 else simulator.classify(run)
    dO, dT = run.drift()
    files = []
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        simulator.write_history_csv(run, out / "history.csv")
        files.append("history.csv")
        for t, U in sorted(run.checkpoints.items()):
            name = f"snapshot_t{t:g}.bin"
            simulator.write_snapshot(out / name, U, run.dx, t)
            files.append(name)
        simulator.write_snapshot(out / "final.bin", run.final, run.dx, float(run.times[-1]))
        files.append("final.bin")
    return {"kind": "simulation", "tag": tag, "mu": r.mu, "omega": cfg.omega, "domain_length": cfg.domain_length,
            "n_modes": cfg.n_modes, "dt": cfg.dt, "t_end": cfg.t_end,
            "initial_deviation": float(run.deviation[0]), "max_deviation": float(np.max(run.deviation)),
            "final_deviation": float(run.deviation[-1]), "omega_drift": dO, "theta_drift": dT,
            "n_samples": int(len(run.times)), "files": files}


# --------------------------------------------------------------------------
# golden examples


def _analysis(H: HomogeneousNonlinearity, mu: float) -> dict:
    return ratio_entry(H, make_ratio(H, mu))


def example1_scan_bound(p: int, b2: float = 1.0) -> float:
    """Upper end of the b1 interval with det M < 1/(p+1), located numerically from build_M."""
    bound = criterion.stability_bound(p)

    def gap(b1):
        H = example1(p, b1, b2)
        return criterion.build_M(H, make_ratio(H, 1.0)).det - bound

    # H_u(1, 1) > 0 needs b1 > -(p+2) b2, and det M rises monotonically in b1 from -inf there
    lo, hi = -(p + 2) * b2 * (1.0 - 1e-6), 1.0
    while gap(hi) < 0.0:
        hi *= 2.0
    return float(optimize.brentq(gap, lo, hi, xtol=1e-14, rtol=1e-15))


def example_values(n: int) -> list[tuple[str, object]]:
    """Live values replayed by ``bbmstab example n``; names match the golden files."""
    vals: list[tuple[str, object]] = []
    if n == 1:
        for p in (1, 2, 3):
            e = _analysis(example1(p, 1.0, 1.0), 1.0)
            vals += [(f"p={p} hu", e["hu"]), (f"p={p} detM", e["detM"]), (f"p={p} verdict", e["verdict"])]
        for p in (1, 2, 3):
            vals += [(f"p={p} b1 bound", example1_scan_bound(p))]
    elif n == 2:
        for q in (1, 2, 3, 4):
            e = _analysis(example2(q), 1.0)
            vals += [(f"q={q} detM", e["detM"]), (f"q={q} verdict", e["verdict"])]
            if e["omega_p"] is not None:
                vals.append((f"q={q} omega_p", e["omega_p"]))
    elif n == 3:
        H = example3(2, 1.0, 1.0)
        for r in find_ratios(H):
            e = ratio_entry(H, r)
            vals += [(f"mu={r.mu:g} detM", e["detM"]), (f"mu={r.mu:g} verdict", e["verdict"])]
        e = _analysis(example3(5, 1.0, 1.0), 0.0)
        vals += [("p=5 mu=0 verdict", e["verdict"]), ("p=5 mu=0 omega_p", e["omega_p"])]
    elif n == 4:
        for beta, mus in ((1.0, (1.0,)), (0.5, (0.0, 1.0)), (2.0, (0.0, 1.0)), (3.0, (1.0,))):
            for mu in mus:
                e = _analysis(example4(beta), mu)
                vals += [(f"beta={beta:g} mu={mu:g} detM", e["detM"]),
                         (f"beta={beta:g} mu={mu:g} verdict", e["verdict"])]
    else:
        raise CliError(EXIT_SCHEMA, "SchemaError", f"example must be 1..4, got {n}")
    return vals


def load_golden(n: int) -> dict:
    text = resources.files("bbmstab").joinpath("golden", f"example{n}.json").read_text()
    return json.loads(text)


def compare_example(n: int, golden: dict | None = None) -> dict:
    golden = golden if golden is not None else load_golden(n)
    expected = {e["name"]: e for e in golden["entries"]}
    entries = []
    live = dict(example_values(n))
    for name in sorted(set(expected) | set(live)):
        value = live.get(name)
        g = expected.get(name, {})
        gv, tol = g.get("value"), g.get("tol")
        if isinstance(gv, (int, float)) and isinstance(value, (int, float)):
            ok = abs(value - gv) <= tol
        else:
            ok = name in expected and name in live and value == gv
        entries.append({"name": name, "value": value, "golden": gv, "tol": tol, "ok": bool(ok)})
    return {"kind": "example", "example": n, "passed": all(e["ok"] for e in entries), "entries": entries}


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bbmstab", description="Stability analysis of proportional solitary "
                                                             "waves in coupled BBM systems.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("analyze", "spectrum", "dprime", "simulate"):
        sp = sub.add_parser(name)
        sp.add_argument("--input", default=None, help="problem JSON (default: stdin)")
        _common(sp)
    ex = sub.add_parser("example")
    ex.add_argument("n", type=int, choices=(1, 2, 3, 4))
    _common(ex)
    return ap


def _common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--out", default=None, help="directory for report files")
    sp.add_argument("--quiet", action="store_true", help="no report on stdout")


def _emit(text: str, name: str, args) -> None:
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    if not args.quiet:
        sys.stdout.write(text)


def render(report: dict) -> str:
    """Serialize and check that the text re-parses under the report schema."""
    text = schema.dumps(report)
    schema.validate_report(json.loads(text))
    return text


def execute(args) -> int:
    if args.command == "example":
        report = compare_example(args.n)
        _emit(render(report), f"example{args.n}.json", args)
        if not report["passed"]:
            bad = [e["name"] for e in report["entries"] if not e["ok"]]
            raise CliError(EXIT_GOLDEN, "GoldenMismatch", f"example {args.n}: {', '.join(bad)}")
        return EXIT_OK
    pb = load_problem(read_input(args.input))
    if args.command == "dprime":
        _emit(cmd_dprime(pb), "dprime.csv", args)
        return EXIT_OK
    if args.command == "analyze":
        report = cmd_analyze(pb)
    elif args.command == "spectrum":
        report = cmd_spectrum(pb)
    else:
        report = cmd_simulate(pb, Path(args.out) if args.out else None)
    _emit(render(report), f"{report['kind']}.json", args)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return execute(args)
    except CliError as exc:
        code, kind, msg = exc.code, exc.kind, str(exc)
    except Exception as exc:  # module errors surface as exit 1 with their type name
        code, kind, msg = EXIT_MODULE, type(exc).__name__, str(exc)
    sys.stderr.write(json.dumps({"error": kind, "message": msg, "exit_code": code}, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
