"""Fourier pseudo-spectral RK4 solver for U_t + U_x - U_xxt + (grad H(U))_x = 0 on a periodic box.

Inverting (1 - d_xx) gives U_t = -m(k) * FFT[U + grad H(U)] with the bounded
multiplier m(k) = i k / (1 + k^2), so a fixed-step explicit scheme is enough.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import fft as sfft
from scipy import optimize

from .moment import ConservedPair, conserved
from .nonlinearity import HomogeneousNonlinearity, grad_H, hessian_H, make_ratio
from .profile import WaveProfile

log = logging.getLogger(__name__)

BLOWUP_LIMIT = 1e6
STABLE_FACTOR = 5.0
UNSTABLE_FACTOR = 10.0

HEURISTIC_STABLE = "Heuristic-Stable"
HEURISTIC_UNSTABLE = "Heuristic-Unstable"
INDETERMINATE = "Indeterminate"


class BlowupDetected(RuntimeError):
    pass


def fft_workers() -> int:
    try:
        return max(1, int(os.environ.get("BBMSTAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class InitialCondition:
    """kind is one of exact | amplitude | bump | two_speed."""

    kind: str = "exact"
    eps: float = 0.0
    omega2: float | None = None
    bump_center: float = 0.0
    bump_width: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exact", "amplitude", "bump", "two_speed"):
            raise ValueError(f"unknown initial condition {self.kind!r}")
        if self.kind == "two_speed" and self.omega2 is None:
            raise ValueError("two_speed needs omega2")


@dataclass(frozen=True)
class SimulationConfig:
    H: HomogeneousNonlinearity
    omega: float
    mu: float
    domain_length: float
    n_modes: int = 1024
    dt: float = 1e-2
    t_end: float = 10.0
    dealias: bool | None = None
    initial: InitialCondition = field(default_factory=InitialCondition)
    sample_every: int = 10
    stable_factor: float = STABLE_FACTOR
    unstable_factor: float = UNSTABLE_FACTOR
    checkpoint_times: tuple[float, ...] = ()

    def __post_init__(self):
        n = self.n_modes
        if n < 8 or n & (n - 1):
            raise ValueError(f"n_modes must be a power of two, got {n}")
        if self.dt <= 0 or self.t_end < 0:
            raise ValueError("dt must be positive and t_end non-negative")

    @property
    def use_dealias(self) -> bool:
        return self.H.p >= 2 if self.dealias is None else bool(self.dealias)

    @property
    def hu(self) -> float:
        return make_ratio(self.H, self.mu).hu

    @property
    def wave(self) -> WaveProfile:
        return WaveProfile(self.H.p, self.omega, self.hu, self.mu)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def suggested_domain_length(wave: WaveProfile, floor: float = 40.0) -> float:
    """Box length putting the wave tails below ~1e-10 at the wrap-around point."""
    return max(floor / wave.width, 2.0 * 23.0 / wave.decay_rate)


class Grid:
    def __init__(self, length: float, n: int):
        self.length = float(length)
        self.n = int(n)
        self.dx = self.length / self.n
        self.x = -0.5 * self.length + self.dx * np.arange(self.n)
        self.k = 2.0 * np.pi * sfft.rfftfreq(self.n, d=self.dx)
        self.k_full = 2.0 * np.pi * sfft.fftfreq(self.n, d=self.dx)

    def periodic(self, x):
        """Wrap positions into [-L/2, L/2)."""
        return (np.asarray(x) + 0.5 * self.length) % self.length - 0.5 * self.length


class BBMSolver:
    def __init__(self, H: HomogeneousNonlinearity, grid: Grid, dealias: bool = True, workers: int | None = None):
        self.H = H
        self.grid = grid
        self.workers = workers or fft_workers()
        k = grid.k
        self.symbol = 1j * k / (1.0 + k * k)
        self.mask = np.ones_like(k)
        if dealias:
            self.mask[np.abs(k) > (2.0 / 3.0) * np.abs(k).max()] = 0.0

    def rhs(self, U: np.ndarray) -> np.ndarray:
        gu, gv = grad_H(self.H, U[0], U[1])
        Uh = sfft.rfft(U, axis=-1, workers=self.workers)
        Nh = sfft.rfft(np.stack([gu, gv]), axis=-1, workers=self.workers) * self.mask
        return sfft.irfft(-self.symbol * (Uh + Nh), n=self.grid.n, axis=-1, workers=self.workers)

    def step(self, U: np.ndarray, dt: float) -> np.ndarray:
        k1 = self.rhs(U)
        k2 = self.rhs(U + 0.5 * dt * k1)
        k3 = self.rhs(U + 0.5 * dt * k2)
        k4 = self.rhs(U + dt * k3)
        out = U + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        peak = np.max(np.abs(out))
        if not np.isfinite(peak) or peak > BLOWUP_LIMIT:
            raise BlowupDetected(f"max|U| = {peak:.3e}")
        return out

    def cfl_number(self, U: np.ndarray, dt: float) -> float:
        """dt * max|m(k)| * (1 + max ||Hess H(U)||); advisory only."""
        k = self.grid.k
        sym = np.max(np.abs(k) / (1.0 + k * k))
        hess = hessian_H(self.H, U[0], U[1])
        hmax = float(np.max(np.abs(hess).sum(axis=0))) if hess.size else 0.0
        return dt * sym * (1.0 + hmax)


def make_solver(config: SimulationConfig) -> BBMSolver:
    return BBMSolver(config.H, Grid(config.domain_length, config.n_modes), config.use_dealias)


def step(state: np.ndarray, config: SimulationConfig, solver: BBMSolver | None = None) -> np.ndarray:
    """Advance the field (shape (2, n_modes)) by one RK4 step of size config.dt."""
    solver = solver or make_solver(config)
    return solver.step(state, config.dt)


def initial_field(config: SimulationConfig, grid: Grid) -> np.ndarray:
    ic = config.initial
    wave = config.wave
    U = wave.field(grid.x)
    if ic.kind == "amplitude":
        U = (1.0 + ic.eps) * U
    elif ic.kind == "bump":
        bump = ic.eps * np.exp(-((grid.periodic(grid.x - ic.bump_center)) / ic.bump_width) ** 2)
        U = U + np.stack([bump, bump])
    elif ic.kind == "two_speed":
        other = WaveProfile(wave.p, ic.omega2, wave.hu, wave.mu)
        U = np.stack([wave.phi(grid.x), wave.mu * other.phi(grid.x)])
    return U


def traveling_wave(wave: WaveProfile, grid: Grid, t: float) -> np.ndarray:
    """Exact solution Phi(x - omega t) wrapped onto the periodic box."""
    return wave.field(grid.periodic(grid.x - wave.omega * t))


# --------------------------------------------------------------------------
# distances


def h1_norm(U: np.ndarray, dx: float) -> float:
    """Discrete H^1 norm with spectral derivative, summed over components."""
    U = np.atleast_2d(U)
    n = U.shape[-1]
    k = 2.0 * np.pi * sfft.fftfreq(n, d=dx)
    Uh = sfft.fft(U, axis=-1)
    return float(np.sqrt(dx / n * np.sum((1.0 + k * k) * np.abs(Uh) ** 2)))


def spectral_shift(U: np.ndarray, s: float, dx: float) -> np.ndarray:
    """U(x + s) by Fourier interpolation."""
    n = U.shape[-1]
    k = 2.0 * np.pi * sfft.rfftfreq(n, d=dx)
    return sfft.irfft(sfft.rfft(U, axis=-1) * np.exp(1j * k * s), n=n, axis=-1)


def modulated_distance(U: np.ndarray, reference: np.ndarray, dx: float) -> tuple[float, float]:
    """min over s of ||U(. + s) - reference||_{H^1}; returns (distance, argmin shift).

    The H^1 cross-correlation over all grid shifts is one inverse FFT; the best
    grid shift is then refined by bounded scalar minimization to 1e-6 dx.
    """
    U = np.atleast_2d(U)
    R = np.atleast_2d(reference)
    n = U.shape[-1]
    length = n * dx
    k = 2.0 * np.pi * sfft.fftfreq(n, d=dx)
    G = np.sum((1.0 + k * k) * sfft.fft(U, axis=-1) * np.conj(sfft.fft(R, axis=-1)), axis=0)
    corr = sfft.ifft(G).real * n  # corr[m] ~ <U(. + m dx), R>, up to the positive factor dx / n
    m = int(np.argmax(corr))
    s0 = m * dx
    s0 = (s0 + 0.5 * length) % length - 0.5 * length

    def neg_corr(s):
        return -float(np.real(np.sum(G * np.exp(1j * k * s))))

    res = optimize.minimize_scalar(neg_corr, bounds=(s0 - dx, s0 + dx), method="bounded",
                                   options={"xatol": 1e-6 * dx})
    s = float(res.x) if res.fun <= neg_corr(s0) else s0
    # the maximum is flat to ~sqrt(eps); a few Newton steps on the slope pin it down
    for _ in range(3):
        e = G * np.exp(1j * k * s)
        d1 = float(np.real(np.sum(1j * k * e)))
        d2 = float(np.real(np.sum(-k * k * e)))
        if d2 >= 0.0 or abs(d1 / d2) > dx:
            break
        s -= d1 / d2
    dist = h1_norm(spectral_shift(U, s, dx) - R, dx)
    return dist, s


# --------------------------------------------------------------------------
# runs


@dataclass
class SimulationRun:
    config: SimulationConfig
    times: np.ndarray
    Omega: np.ndarray
    Theta: np.ndarray
    deviation: np.ndarray
    shift: np.ndarray
    checkpoints: dict[float, np.ndarray]
    final: np.ndarray
    dx: float

    @property
    def conserved_history(self) -> list[ConservedPair]:
        return [ConservedPair(float(a), float(b)) for a, b in zip(self.Omega, self.Theta)]

    def drift(self) -> tuple[float, float]:
        """Max relative drift of Omega and Theta over the run."""
        dO = float(np.max(np.abs(self.Omega - self.Omega[0])) / abs(self.Omega[0]))
        dT = float(np.max(np.abs(self.Theta - self.Theta[0])) / abs(self.Theta[0]))
        return dO, dT


def run(config: SimulationConfig, U0: np.ndarray | None = None) -> SimulationRun:
    solver = make_solver(config)
    grid = solver.grid
    wave = config.wave
    ref = wave.field(grid.x)
    U = initial_field(config, grid) if U0 is None else np.array(U0, dtype=float)
    cfl = solver.cfl_number(U, config.dt)
    if cfl > 0.5:
        log.warning("CFL-like number %.3f exceeds 0.5; consider a smaller dt", cfl)
    pending = sorted(config.checkpoint_times)
    times, Om, Th, dev, sh = [], [], [], [], []
    checkpoints: dict[float, np.ndarray] = {}

    def sample(t, U):
        c = conserved(U, grid.dx, config.H)
        d, s = modulated_distance(U, ref, grid.dx)
        times.append(t)
        Om.append(c.Omega)
        Th.append(c.Theta)
        dev.append(d)
        sh.append(s)

    sample(0.0, U)
    n = config.n_steps
    for i in range(1, n + 1):
        U = solver.step(U, config.dt)
        t = i * config.dt
        while pending and pending[0] <= t + 0.5 * config.dt:
            checkpoints[pending.pop(0)] = U.copy()
        if i % config.sample_every == 0 or i == n:
            sample(t, U)
    return SimulationRun(config=config, times=np.array(times), Omega=np.array(Om), Theta=np.array(Th),
                         deviation=np.array(dev), shift=np.array(sh), checkpoints=checkpoints,
                         final=U, dx=grid.dx)


def classify(run_: SimulationRun) -> str:
    """Empirical tag from the modulated-deviation history. Not a proof of anything."""
    cfg = run_.config
    d0 = run_.deviation[0]
    if np.max(run_.deviation) <= cfg.stable_factor * d0:
        return HEURISTIC_STABLE
    if run_.deviation[-1] >= cfg.unstable_factor * d0:
        return HEURISTIC_UNSTABLE
    return INDETERMINATE


def stability_experiment(config: SimulationConfig) -> tuple[SimulationRun, str]:
    if config.initial.kind == "exact":
        raise ValueError("a stability experiment needs a perturbed or two-speed initial condition")
    r = run(config)
    if r.deviation[0] == 0.0:
        raise ValueError("initial deviation is zero; perturbation too small to classify")
    return r, classify(r)


def measured_speed(U0: np.ndarray, U1: np.ndarray, dx: float, elapsed: float) -> float:
    """Speed from the translation that best maps U1 back onto U0."""
    _, s = modulated_distance(U1, U0, dx)
    return s / elapsed


# --------------------------------------------------------------------------
# output formats


def write_history_csv(run_: SimulationRun, path: str | Path) -> None:
    path = Path(path)
    with path.open("w") as fh:
        fh.write("time,Omega,Theta,deviation\n")
        for row in zip(run_.times, run_.Omega, run_.Theta, run_.deviation):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_snapshot(path: str | Path, U: np.ndarray, dx: float, time: float) -> None:
    """One JSON header line, then the (2, n) field as little-endian float64."""
    U = np.ascontiguousarray(U, dtype="<f8")
    header = {"dtype": "<f8", "shape": list(U.shape), "n_points": int(U.shape[-1]), "dx": float(dx),
              "time": float(time)}
    with Path(path).open("wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(U.tobytes())


def read_snapshot(path: str | Path) -> tuple[dict, np.ndarray]:
    with Path(path).open("rb") as fh:
        header = json.loads(fh.readline())
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(header["shape"])
    return header, data
