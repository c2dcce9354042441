"""Closed-form proportional solitary wave phi = A^{1/p} sech^{2/p}(B x)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WaveProfile:
    p: int
    omega: float
    hu: float
    mu: float = 0.0

    def __post_init__(self):
        if not self.omega > 1.0:
            raise ValueError(f"wave speed must exceed 1, got {self.omega}")
        if not self.hu > 0.0:
            raise ValueError(f"H_u(1, mu) must be positive, got {self.hu}")

    @property
    def amplitude(self) -> float:
        return (self.p + 2) * (self.omega - 1.0) / (2.0 * self.hu)

    @property
    def width(self) -> float:
        return 0.5 * self.p * np.sqrt((self.omega - 1.0) / self.omega)

    @property
    def decay_rate(self) -> float:
        """Exponential decay rate of phi in x, (2/p) B."""
        return 2.0 * self.width / self.p

    def phi(self, x):
        return self.amplitude ** (1.0 / self.p) * _sech(self.width * np.asarray(x)) ** (2.0 / self.p)

    def dphi(self, x):
        bx = self.width * np.asarray(x)
        # sinh(Bx) sech^{2/p+1}(Bx) written as tanh sech^{2/p} to avoid overflow
        return (-2.0 / self.p * self.amplitude ** (1.0 / self.p) * self.width
                * np.tanh(bx) * _sech(bx) ** (2.0 / self.p))

    def d2phi(self, x):
        m = 2.0 / self.p
        s = _sech(self.width * np.asarray(x))
        return self.amplitude ** (1.0 / self.p) * m * self.width ** 2 * s ** m * (m - (m + 1.0) * s * s)

    def potential(self, x):
        """phi_0 = (p+1)(p+2)(omega-1)/2 sech^2(B x) = (p+1) H_u(1,mu) phi^p."""
        p = self.p
        return 0.5 * (p + 1) * (p + 2) * (self.omega - 1.0) * _sech(self.width * np.asarray(x)) ** 2

    def field(self, x) -> np.ndarray:
        """Two-component wave (phi, mu phi), shape (2, len(x))."""
        f = self.phi(x)
        return np.stack([f, self.mu * f])

    def residual(self, x):
        """-omega phi'' + (omega-1) phi - H_u phi^{p+1} pointwise."""
        f = self.phi(x)
        return -self.omega * self.d2phi(x) + (self.omega - 1.0) * f - self.hu * f ** (self.p + 1)


def _sech(z):
    # 1/cosh overflows gracefully to 0 for large |z|
    with np.errstate(over="ignore"):
        return 1.0 / np.cosh(z)
