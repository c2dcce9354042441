"""Conserved functionals along the wave family and the sign of d''(omega).

With d(omega) = Theta(Phi_omega) + omega Omega(Phi_omega) one has
d'(omega) = Omega(Phi_omega), and for the sech-power profile

    Omega(Phi_omega) = th1 (w-1)^{2/p} sqrt(w/(w-1)) + th2 (w-1)^{2/p} sqrt((w-1)/w)

so d''(omega) = (w-1)^{2/p - 3/2} w^{-3/2} q(w) with q quadratic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy import integrate, special

from .nonlinearity import HomogeneousNonlinearity, eval_H
from .profile import WaveProfile, _sech

OMEGA_MIN_OFFSET = 1e-6
TAIL_TOL = 1e-12


class QuadratureNotConverged(RuntimeError):
    pass


class StepTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class ConservedPair:
    Omega: float
    Theta: float


@dataclass(frozen=True)
class MomentConstants:
    theta1: float
    theta2: float
    p: int
    mu: float
    hu: float

    def q_coeffs(self) -> tuple[float, float, float]:
        """(a, b, c) with q(w) = a w^2 + b w + c."""
        t1, t2, r = self.theta1, self.theta2, 2.0 / self.p
        return r * (t1 + t2), -(t1 / 2.0 + r * t2 - t2 / 2.0), -t2 / 2.0

    def q(self, omega):
        a, b, c = self.q_coeffs()
        return (a * omega + b) * omega + c

    def omega_integral(self, omega):
        """Omega(Phi_omega) from the theta form."""
        w = np.asarray(omega, dtype=float)
        base = (w - 1.0) ** (2.0 / self.p)
        return self.theta1 * base * np.sqrt(w / (w - 1.0)) + self.theta2 * base * np.sqrt((w - 1.0) / w)


# --------------------------------------------------------------------------
# conserved functionals on a grid


def spectral_derivative(U: np.ndarray, dx: float, workers: int | None = None) -> np.ndarray:
    n = U.shape[-1]
    k = 2.0 * np.pi * sfft.fftfreq(n, d=dx)
    return sfft.ifft(1j * k * sfft.fft(U, axis=-1, workers=workers), axis=-1, workers=workers).real


def conserved(U: np.ndarray, dx: float, H: HomogeneousNonlinearity | None = None,
              periodic: bool = True) -> ConservedPair:
    """Omega = 1/2 int U.U + U_x.U_x, Theta = -1/2 int U.U + 2 H(U) on a uniform grid.

    U has shape (2, n).  Periodic data uses spectral differentiation and the
    rectangle rule (spectrally accurate); otherwise central differences and
    the trapezoid rule.  Without H, Theta carries only the quadratic part.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if periodic:
        Ux = spectral_derivative(U, dx)
        quad = lambda f: float(np.sum(f) * dx)
    else:
        Ux = np.gradient(U, dx, axis=-1)
        quad = lambda f: float(integrate.trapezoid(f, dx=dx))
    UU = np.sum(U * U, axis=0)
    Omega = 0.5 * quad(UU + np.sum(Ux * Ux, axis=0))
    HU = 2.0 * eval_H(H, U[0], U[1]) if H is not None and U.shape[0] == 2 else 0.0
    Theta = -0.5 * quad(UU + HU)
    return ConservedPair(Omega, Theta)


# --------------------------------------------------------------------------
# sech-power integrals


def sech_power_integral(m: float) -> float:
    """Closed form of int_R sech^m(y) dy = B(m/2, 1/2)."""
    return float(special.beta(m / 2.0, 0.5))


def _tail_cutoff(m: float, total_guess: float) -> float:
    # int_Y^inf sech^m <= 2^m e^{-mY} / m; pick Y so this is below TAIL_TOL * total
    return max(10.0, math.log(2.0 ** m / (m * TAIL_TOL * total_guess)) / m)


def _quad_even(f, Y: float) -> float:
    val, err = integrate.quad(f, 0.0, Y, epsabs=0.0, epsrel=1e-13, limit=500)
    if not np.isfinite(val) or err > 1e-11 * max(abs(val), 1e-300):
        raise QuadratureNotConverged(f"quad error estimate {err:.3e} for value {val:.6e}")
    return 2.0 * val


def sech_integrals(p: int) -> tuple[float, float]:
    """I1 = int sech^{4/p}(y) dy and I2 = int sinh^2(y) sech^{4/p+2}(y) dy by adaptive quadrature."""
    m = 4.0 / p
    # crude magnitude estimate only sizes the cutoff
    Y = _tail_cutoff(m, 1.0 / (m + 1.0))
    I1 = _quad_even(lambda y: _sech(y) ** m, Y)
    I2 = _quad_even(lambda y: np.tanh(y) ** 2 * _sech(y) ** m, Y)
    return I1, I2


def moment_constants(p: int, mu: float, hu: float) -> MomentConstants:
    if not hu > 0.0:
        raise ValueError("H_u(1, mu) must be positive")
    if p < 1:
        raise ValueError("p must be >= 1")
    I1, I2 = sech_integrals(p)
    pref = 0.5 * (1.0 + mu * mu) * ((p + 2) / (2.0 * hu)) ** (2.0 / p)
    # int phi^2 = A^{2/p} I1 / B and int phi_x^2 = (4/p^2) A^{2/p} B I2, with B = (p/2) sqrt((w-1)/w)
    theta1 = pref * (2.0 / p) * I1
    theta2 = pref * (4.0 / p ** 2) * (p / 2.0) * I2
    return MomentConstants(theta1=theta1, theta2=theta2, p=p, mu=mu, hu=hu)


# --------------------------------------------------------------------------
# d'' and the threshold speed


def _check_omega(omega: float):
    if not omega >= 1.0 + OMEGA_MIN_OFFSET:
        raise ValueError(f"omega must be at least 1 + {OMEGA_MIN_OFFSET}, got {omega}")


def d_second(omega: float, mc: MomentConstants) -> float:
    """Closed form d''(w) = (w-1)^{2/p-3/2} w^{-3/2} q(w).  Diverges like (w-1)^{2/p-3/2} as w -> 1 when p > 4/3."""
    _check_omega(omega)
    return float((omega - 1.0) ** (2.0 / mc.p - 1.5) * omega ** -1.5 * mc.q(omega))


def omega_threshold(mc: MomentConstants) -> float | None:
    """Larger root of q for p > 4; None when p <= 4 (then q > 0 on w > 1)."""
    if mc.p <= 4:
        return None
    a, b, c = mc.q_coeffs()
    disc = math.sqrt(b * b - 4.0 * a * c)
    # a > 0 > c, so the roots have opposite signs; pick the positive one without cancellation
    if b >= 0.0:
        return 2.0 * c / (-b - disc)
    return (-b + disc) / (2.0 * a)


def omega_quadrature(omega: float, p: int, mu: float, hu: float) -> float:
    """Omega(Phi_omega) by direct quadrature of the closed-form profile in x."""
    wave = WaveProfile(p, omega, hu, mu)
    m = 4.0 / p
    X = _tail_cutoff(m, 1.0 / (m + 1.0)) / wave.width
    val = _quad_even(lambda x: wave.phi(x) ** 2 + wave.dphi(x) ** 2, X)
    return 0.5 * (1.0 + mu * mu) * val


def d_second_fd(omega: float, p: int, mu: float, hu: float, h: float | None = None,
                rel_tol: float = 1e-4) -> float:
    """Central difference of Omega(Phi_omega) in omega; the oracle for :func:`d_second`.

    The default step shrinks near omega = 1, where Omega has a power singularity.
    """
    if h is None:
        h = min(1e-3, (omega - 1.0) / 200.0)
    if not omega - h > 1.0:
        raise ValueError("omega - h must exceed 1")

    def central(step):
        return (omega_quadrature(omega + step, p, mu, hu) - omega_quadrature(omega - step, p, mu, hu)) / (2 * step)

    coarse, fine = central(h), central(h / 2)
    # O(h^2) truncation: the step-h error is ~ 4/3 (coarse - fine)
    err = 4.0 * abs(coarse - fine) / 3.0
    if err > rel_tol * abs(fine):
        raise StepTooLarge(f"Richardson error {err:.3e} exceeds {rel_tol} relative at omega={omega}")
    return coarse


def dprime_table(mc: MomentConstants, omegas) -> list[tuple[float, float, float]]:
    """Rows (omega, d''(omega), q(omega))."""
    return [(float(w), d_second(float(w), mc), float(mc.q(w))) for w in omegas]


def scalar_conserved(u: np.ndarray, dx: float, hbar: float, p: int, periodic: bool = True) -> ConservedPair:
    """Scalar-equation functionals, realized as the v = 0 slice of the coupled ones.

    u_t + u_x - u_xxt + hbar u^p u_x = 0 is the coupled system with
    H = hbar u^{p+2} / ((p+1)(p+2)).
    """
    H = HomogeneousNonlinearity.from_terms(p, {p + 2: hbar / ((p + 1) * (p + 2))})
    U = np.stack([np.asarray(u, dtype=float), np.zeros_like(u, dtype=float)])
    return conserved(U, dx, H, periodic)
