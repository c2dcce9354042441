"""Point spectra of the linearized operators around a proportional solitary wave.

Two routes are kept side by side: the exact Poschl-Teller eigenvalues of
-d^2/dy^2 - alpha sech^2(y), and a discretized Schrodinger eigensolver on a
Dirichlet interval.  The operators of interest are

    L1 = -omega d^2/dx^2 + (omega - 1) - phi_0(x)
    L2 = -omega d^2/dx^2 + (omega - 1) - det(M) phi_0(x)

and the coupled 2x2 operator L whose orthogonal rotation is diag(L1, L2).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import fft as sfft
from scipy import linalg

from .criterion import build_M
from .nonlinearity import HomogeneousNonlinearity, ProportionalRatio, hessian_H
from .profile import WaveProfile, _sech

SCHEMES = ("fd2", "fd4", "spectral")
RICHARDSON_TOL = 1e-6


class GridTooCoarse(RuntimeError):
    pass


class Unsupported(ValueError):
    pass


@dataclass(frozen=True)
class DiscretizationParams:
    half_width: float | None = None
    n_points: int = 2048
    scheme: str = "fd4"
    richardson: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.n_points < 16:
            raise ValueError("n_points too small")

    def resolve(self, wave: WaveProfile) -> float:
        if self.half_width is not None:
            return float(self.half_width)
        return default_half_width(wave)


def default_half_width(wave: WaveProfile) -> float:
    # the last term keeps exp(-decay * L) <= e^-12 for the slowly decaying p >= 4 modes
    return max(20.0, 12.0 / wave.width, 12.0 / wave.decay_rate)


# --------------------------------------------------------------------------
# exact spectrum


@dataclass(frozen=True)
class PoschlTellerSpectrum:
    alpha: float
    s: float
    eps: tuple[float, ...]
    eigenvalues: tuple[float, ...]

    @property
    def least(self) -> float:
        return self.eigenvalues[0]


def poschl_teller_s(alpha: float) -> float:
    return 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * alpha))


def poschl_teller_spectrum(alpha: float) -> PoschlTellerSpectrum:
    """Bound states of -d^2/dy^2 - alpha sech^2(y): lambda_n = -(s - ceil(s) + n)^2, n = 1..ceil(s)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    s = poschl_teller_s(alpha)
    # guard against s = 2.9999999999999996 when alpha = 12
    s_int = round(s)
    top = s_int if abs(s - s_int) <= 1e-12 * max(1.0, s) else math.ceil(s)
    eps = [s - top + n for n in range(1, top + 1)]
    eps = [e for e in eps if e > 0.0]
    assert all(e > 0 for e in eps)
    lam = sorted(-e * e for e in eps)
    return PoschlTellerSpectrum(alpha=alpha, s=s, eps=tuple(sorted(eps, reverse=True)), eigenvalues=tuple(lam))


# Condon-Shortley phase; these are the eigenfunctions listed for s = 3.
_LEGENDRE_TABLE: dict[tuple[int, int], Callable[[np.ndarray], np.ndarray]] = {
    (1, 1): lambda xi: -np.sqrt(1 - xi ** 2),
    (2, 1): lambda xi: -3.0 * xi * np.sqrt(1 - xi ** 2),
    (2, 2): lambda xi: 3.0 * (1 - xi ** 2),
    (3, 1): lambda xi: -1.5 * (5 * xi ** 2 - 1) * np.sqrt(1 - xi ** 2),
    (3, 2): lambda xi: 15.0 * xi * (1 - xi ** 2),
    (3, 3): lambda xi: -15.0 * (1 - xi ** 2) ** 1.5,
}


def legendre_eigenfunction(s: float, eps: float, x) -> np.ndarray:
    """P_s^eps(tanh x), the bound state of -d^2/dx^2 - s(s+1) sech^2 with eigenvalue -eps^2.

    Tabulated for integer s <= 3; for other s only the ground state eps = s,
    which is sech^s(x).
    """
    x = np.asarray(x, dtype=float)
    key = (int(round(s)), int(round(eps)))
    if float(s).is_integer() and float(eps).is_integer() and key in _LEGENDRE_TABLE:
        xi = np.tanh(x)
        return _LEGENDRE_TABLE[key](xi)
    if eps == s and s > 0:
        return _sech(x) ** s
    raise Unsupported(f"P_{s}^{eps} is only tabulated for integer s <= 3 or the ground state eps = s")


# --------------------------------------------------------------------------
# discretized operators


def interior_grid(half_width: float, n_points: int) -> tuple[np.ndarray, float]:
    h = 2.0 * half_width / (n_points + 1)
    x = -half_width + h * np.arange(1, n_points + 1)
    return x, h


def _laplacian_bands(kinetic: float, h: float, scheme: str) -> list[float]:
    """Stencil of -kinetic d^2/dx^2 as [diag, off1, off2, ...]."""
    c = kinetic / (h * h)
    if scheme == "fd2":
        return [2.0 * c, -c]
    if scheme == "fd4":
        return [30.0 * c / 12.0, -16.0 * c / 12.0, c / 12.0]
    raise ValueError(scheme)


def _diagonal(bands: list[float], n: int) -> np.ndarray:
    d = np.full(n, bands[0])
    if len(bands) == 3:
        # odd reflection f(-L - h) = -f(-L + h) closes the wide stencil at a Dirichlet end
        d[0] -= bands[2]
        d[-1] -= bands[2]
    return d


def _sinc_dvr(kinetic: float, h: float, n: int) -> np.ndarray:
    # Colbert-Miller kinetic matrix on a uniform grid that vanishes at the ends
    idx = np.arange(n)
    d = idx[:, None] - idx[None, :]
    with np.errstate(divide="ignore"):
        T = 2.0 * (-1.0) ** np.abs(d) / (d.astype(float) ** 2)
    np.fill_diagonal(T, np.pi ** 2 / 3.0)
    return kinetic * T / (h * h)


def operator_matrix(potential: np.ndarray, kinetic: float, h: float, scheme: str) -> np.ndarray:
    """Dense matrix of -kinetic d^2/dx^2 + diag(potential). Mostly for tests."""
    n = len(potential)
    if scheme == "spectral":
        A = _sinc_dvr(kinetic, h, n)
    else:
        bands = _laplacian_bands(kinetic, h, scheme)
        A = np.diag(_diagonal(bands, n))
        for k in range(1, len(bands)):
            A += np.diag(np.full(n - k, bands[k]), k) + np.diag(np.full(n - k, bands[k]), -k)
    A[np.diag_indices(n)] += potential
    return A


def lowest_eigenvalues(potential: np.ndarray, kinetic: float, h: float, scheme: str, k: int) -> np.ndarray:
    """Lowest k eigenvalues of -kinetic d^2/dx^2 + diag(potential) with Dirichlet ends."""
    n = len(potential)
    k = min(k, n)
    if scheme == "spectral":
        A = _sinc_dvr(kinetic, h, n)
        A[np.diag_indices(n)] += potential
        return linalg.eigh(A, eigvals_only=True, subset_by_index=(0, k - 1))
    bands = _laplacian_bands(kinetic, h, scheme)
    if scheme == "fd2":
        return linalg.eigh_tridiagonal(_diagonal(bands, n) + potential, np.full(n - 1, bands[1]),
                                       eigvals_only=True, select="i", select_range=(0, k - 1))
    ab = np.zeros((len(bands), n))
    ab[0] = _diagonal(bands, n) + potential
    for j in range(1, len(bands)):
        ab[j, : n - j] = bands[j]
    return linalg.eig_banded(ab, lower=True, eigvals_only=True, select="i", select_range=(0, k - 1))


def schrodinger_eigenvalues(potential_fn: Callable[[np.ndarray], np.ndarray], kinetic: float,
                            half_width: float, n_points: int, k: int = 6, scheme: str = "fd4",
                            richardson: bool = False) -> np.ndarray:
    x, h = interior_grid(half_width, n_points)
    eigs = lowest_eigenvalues(potential_fn(x), kinetic, h, scheme, k)
    if richardson:
        x2, h2 = interior_grid(half_width, 2 * n_points + 1)
        fine = lowest_eigenvalues(potential_fn(x2), kinetic, h2, scheme, 1)
        shift = abs(fine[0] - eigs[0])
        if shift > RICHARDSON_TOL * (1.0 + abs(eigs[0])):
            raise GridTooCoarse(f"least eigenvalue moved by {shift:.3e} under grid doubling")
    return eigs


def poschl_teller_numeric(alpha: float, half_width: float = 40.0, n_points: int = 4096,
                          k: int = 6, scheme: str = "fd4") -> np.ndarray:
    """Lowest k eigenvalues of the discretized -d^2/dy^2 - alpha sech^2(y)."""
    return schrodinger_eigenvalues(lambda y: -alpha * _sech(y) ** 2, 1.0, half_width, n_points, k, scheme)


def numeric_spectrum(potential_scale: float, p: int, omega: float,
                     grid: DiscretizationParams | None = None, k: int = 6) -> np.ndarray:
    """Lowest k eigenvalues of -omega d^2/dx^2 + (omega-1) - potential_scale * phi_0(x).

    potential_scale = 1 is L1, potential_scale = det M is L2.  phi_0 does not
    depend on H_u, so the profile is built with H_u = 1.
    """
    grid = grid or DiscretizationParams()
    wave = WaveProfile(p, omega, 1.0)
    L = grid.resolve(wave)
    if L < 10.0 / wave.width:
        raise GridTooCoarse(f"half width {L} is below the decay margin 10/B = {10.0 / wave.width}")
    return schrodinger_eigenvalues(lambda x: (omega - 1.0) - potential_scale * wave.potential(x),
                                   omega, L, grid.n_points, k, grid.scheme, grid.richardson)


def analytic_L1_least(p: int, omega: float) -> float:
    return -p * (p + 4) * (omega - 1.0) / 4.0


def analytic_L1_eigenvalues(p: int, omega: float) -> list[float]:
    """All L1 eigenvalues below the continuum edge omega - 1, from the Poschl-Teller ladder."""
    return _scaled_ladder(2.0 * (p + 1) * (p + 2) / p ** 2, p, omega)


def analytic_L2_eigenvalues(p: int, omega: float, detM: float) -> list[float]:
    if detM <= 0.0:
        return []
    return _scaled_ladder(2.0 * (p + 1) * (p + 2) * detM / p ** 2, p, omega)


def _scaled_ladder(alpha: float, p: int, omega: float) -> list[float]:
    # x -> y = B x maps L to (p^2 (omega-1)/4) (L_y0 + 4/p^2)
    scale = p * p * (omega - 1.0) / 4.0
    pt = poschl_teller_spectrum(alpha)
    return [scale * (lam + 4.0 / p ** 2) for lam in pt.eigenvalues]


def l2_positivity_threshold(p: int) -> float:
    if p < 1:
        raise ValueError("p must be >= 1")
    return 1.0 / (p + 1)


def l2_s(p: int, detM: float) -> float:
    """Poschl-Teller s of the rescaled L2; s < 2/p exactly when det M < 1/(p+1)."""
    return 0.5 * (-1.0 + math.sqrt(1.0 + 8.0 * (p + 1) * (p + 2) * detM / p ** 2))


def zero_mode_residual(p: int, omega: float, n_points: int = 2048, half_width: float | None = None) -> float:
    """||L1 phi'|| / ||phi'|| with Fourier differentiation on the periodic box [-L, L)."""
    wave = WaveProfile(p, omega, 1.0)
    L = half_width if half_width is not None else zero_mode_half_width(wave)
    x = -L + 2.0 * L * np.arange(n_points) / n_points
    f = wave.dphi(x)
    k = 2.0 * np.pi * sfft.fftfreq(n_points, d=2.0 * L / n_points)
    f_xx = sfft.ifft(-(k ** 2) * sfft.fft(f)).real
    Lf = -omega * f_xx + (omega - 1.0) * f - wave.potential(x) * f
    return float(np.linalg.norm(Lf) / np.linalg.norm(f))


def zero_mode_half_width(wave: WaveProfile) -> float:
    # 20/B when p = 1; otherwise wide enough that phi' is ~e^-36 at the box edge,
    # since the periodic wrap-around jump is amplified by k_max^2
    return max(20.0 / wave.width, 36.0 / wave.decay_rate)


def block_eigenvalues(H: HomogeneousNonlinearity, ratio: ProportionalRatio, omega: float,
                      grid: DiscretizationParams | None = None, k: int = 8) -> np.ndarray:
    """Lowest k eigenvalues of the coupled operator (-omega d^2 + omega - 1) I - Hess H(phi, mu phi).

    The Hessian is evaluated pointwise along the wave, not through M, so this
    is an independent route to the diag(L1, L2) spectrum.  Components are
    interleaved so the matrix stays banded.
    """
    grid = grid or DiscretizationParams()
    if grid.scheme == "spectral":
        raise Unsupported("block operator is assembled for the finite-difference schemes only")
    wave = WaveProfile(H.p, omega, ratio.hu, ratio.mu)
    L = grid.resolve(wave)
    x, h = interior_grid(L, grid.n_points)
    n = len(x)
    phi = wave.phi(x)
    W = hessian_H(H, phi, ratio.mu * phi)  # (2, 2, n)
    bands = _laplacian_bands(omega, h, grid.scheme)
    nb = 2 * (len(bands) - 1) + 1
    ab = np.zeros((nb, 2 * n))
    diag = _diagonal(bands, n) + (omega - 1.0)
    ab[0, 0::2] = diag - W[0, 0]
    ab[0, 1::2] = diag - W[1, 1]
    ab[1, 0::2] = -W[0, 1]
    for j in range(1, len(bands)):
        ab[2 * j, : 2 * n - 2 * j] = bands[j]
    return linalg.eig_banded(ab, lower=True, eigvals_only=True, select="i", select_range=(0, k - 1))


@dataclass
class SpectrumReport:
    p: int
    omega: float
    mu: float
    detM: float
    cont_edge: float
    analytic_L1_least: float
    analytic_L1_eigs: list[float]
    analytic_L2_eigs: list[float]
    numeric_L1_eigs: list[float]
    numeric_L2_eigs: list[float]
    zero_mode_residual: float
    block_max_diff: float
    n_negative: int
    has_zero_mode: bool
    L2_positive: bool
    flags_ok: bool = field(default=False)

    def to_dict(self) -> dict:
        return asdict(self)


def linearized_report(H: HomogeneousNonlinearity, ratio: ProportionalRatio, omega: float,
                      grid: DiscretizationParams | None = None, k: int = 6,
                      zero_tol: float = 1e-6) -> SpectrumReport:
    """Numeric and exact spectra of L1 and L2, the block cross-check, and the flags
    (one negative eigenvalue, a simple zero mode, L2 positive) the stability argument needs."""
    grid = grid or DiscretizationParams()
    M = build_M(H, ratio)
    p = H.p
    edge = omega - 1.0
    l1 = numeric_spectrum(1.0, p, omega, grid, k)
    l2 = numeric_spectrum(M.det, p, omega, grid, k)
    l1_pts = [float(v) for v in l1 if v < edge]
    l2_pts = [float(v) for v in l2 if v < edge]
    block = block_eigenvalues(H, ratio, omega, grid, 2 * k)
    union = np.sort(np.concatenate([l1, l2]))
    # compare only below the largest eigenvalue both sides are guaranteed to contain
    m = min(len(block), k)
    block_diff = float(np.max(np.abs(block[:m] - union[:m])))
    scale = max(1.0, abs(l1[0]))
    below = np.array(l1_pts + l2_pts)
    n_neg = int(np.sum(below < -zero_tol * scale))
    has_zero = bool(np.sum(np.abs(below) <= zero_tol * scale) == 1)
    l2_pos = bool(l2[0] > zero_tol * scale)
    return SpectrumReport(
        p=p, omega=omega, mu=ratio.mu, detM=M.det, cont_edge=edge,
        analytic_L1_least=analytic_L1_least(p, omega),
        analytic_L1_eigs=analytic_L1_eigenvalues(p, omega),
        analytic_L2_eigs=analytic_L2_eigenvalues(p, omega, M.det),
        numeric_L1_eigs=l1_pts, numeric_L2_eigs=l2_pts,
        zero_mode_residual=zero_mode_residual(p, omega, n_points=grid.n_points),
        block_max_diff=block_diff, n_negative=n_neg, has_zero_mode=has_zero, L2_positive=l2_pos,
        flags_ok=bool(n_neg == 1 and has_zero and l2_pos and edge > 0),
    )
