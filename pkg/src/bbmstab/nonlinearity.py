"""Homogeneous polynomial nonlinearities H(u, v) and the proportional ratios they admit.

H is stored by its coefficient list, ``H(u, v) = sum_i C_i u**i v**(p+2-i)``.
Everything else (gradient, Hessian, the ratio polynomial) is exact term-by-term
differentiation of that representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REALNESS_TOL = 1e-8
DEDUP_TOL = 1e-9
RESIDUAL_TOL = 1e-10


class EmptySpectrumOfRoots(ValueError):
    """The ratio polynomial has no real root, so no proportional wave exists."""


class ContinuumOfRatios(ValueError):
    """H_v(1, mu) - mu H_u(1, mu) vanishes identically; every mu is a ratio.

    Callers must pick mu explicitly in that case.
    """


@dataclass(frozen=True)
class HomogeneousNonlinearity:
    p: int
    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p!r}")
        if len(coeffs) != self.p + 3:
            raise ValueError(f"expected {self.p + 3} coefficients for p={self.p}, got {len(coeffs)}")
        if not any(coeffs):
            raise ValueError("H must have at least one nonzero coefficient")

    @classmethod
    def from_terms(cls, p: int, terms: dict[int, float]) -> "HomogeneousNonlinearity":
        """Build H from ``{power of u: coefficient}``; the v power is implied."""
        coeffs = [0.0] * (p + 3)
        for i, c in terms.items():
            coeffs[i] += c
        return cls(p, tuple(coeffs))

    @property
    def degree(self) -> int:
        return self.p + 2

    def scaled(self, factor: float) -> "HomogeneousNonlinearity":
        return HomogeneousNonlinearity(self.p, tuple(factor * c for c in self.coeffs))

    # Each monomial u^i v^j is differentiated exactly; powers that would go
    # negative carry a zero coefficient, so they are skipped.
    def _sum(self, u, v, du: int, dv: int):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        n = self.degree
        total = np.zeros(np.broadcast(u, v).shape)
        for i, c in enumerate(self.coeffs):
            j = n - i
            if c == 0.0 or i < du or j < dv:
                continue
            factor = c
            for k in range(du):
                factor *= i - k
            for k in range(dv):
                factor *= j - k
            total = total + factor * u ** (i - du) * v ** (j - dv)
        return total if total.shape else float(total)


def eval_H(H: HomogeneousNonlinearity, u, v):
    return H._sum(u, v, 0, 0)


def grad_H(H: HomogeneousNonlinearity, u, v):
    """Return (H_u, H_v); works pointwise on arrays."""
    return H._sum(u, v, 1, 0), H._sum(u, v, 0, 1)


def hessian_H(H: HomogeneousNonlinearity, u, v) -> np.ndarray:
    huu = H._sum(u, v, 2, 0)
    huv = H._sum(u, v, 1, 1)
    hvv = H._sum(u, v, 0, 2)
    return np.array([[huu, huv], [huv, hvv]])


@dataclass(frozen=True)
class ProportionalRatio:
    mu: float
    hu: float
    admissible: bool


def ratio_polynomial(H: HomogeneousNonlinearity) -> np.ndarray:
    """Coefficients (highest power first) of g(mu) = H_v(1, mu) - mu H_u(1, mu).

    The C_0 term of mu*H_u cancels, so deg g <= p + 2.
    """
    n = H.degree
    # g as ascending powers of mu; index = power
    g = np.zeros(n + 2)
    for i, c in enumerate(H.coeffs):
        j = n - i
        if j >= 1:
            g[j - 1] += j * c  # H_v(1, mu) term
        g[j + 1] -= i * c  # mu * H_u(1, mu) term
    return g[::-1][1:]  # drop the always-zero mu^(n+1) entry


def _ratio_for(H: HomogeneousNonlinearity, mu: float) -> ProportionalRatio:
    hu = float(grad_H(H, 1.0, mu)[0])
    return ProportionalRatio(mu=float(mu), hu=hu, admissible=hu > 0.0)


def make_ratio(H: HomogeneousNonlinearity, mu: float) -> ProportionalRatio:
    """Annotate a user-supplied mu. Checks the proportionality condition."""
    if ratio_residual(H, mu) > RESIDUAL_TOL:
        raise ValueError(f"mu={mu} does not satisfy H_v(1,mu) = mu H_u(1,mu)")
    return _ratio_for(H, mu)


def ratio_residual(H: HomogeneousNonlinearity, mu: float) -> float:
    """|H_v(1,mu) - mu H_u(1,mu)| scaled by the size of the polynomial at mu."""
    g = ratio_polynomial(H)
    scale = np.sum(np.abs(g)) * max(1.0, abs(mu)) ** (len(g) - 1)
    if scale == 0.0:
        return 0.0
    return abs(np.polyval(g, mu)) / scale


CLUSTER_TOL = 1e-5


def _clusters(zs: np.ndarray) -> list[list[complex]]:
    # A root of multiplicity m comes back from the companion matrix as m
    # points spread by ~eps**(1/m); their mean is well conditioned.
    groups: list[list[complex]] = []
    for z in sorted(zs, key=lambda z: (z.real, z.imag)):
        for grp in groups:
            if abs(z - grp[0]) <= CLUSTER_TOL * (1.0 + abs(grp[0])):
                grp.append(z)
                break
        else:
            groups.append([z])
    return groups


def _newton(g: np.ndarray, x: float, iters: int = 4) -> float:
    dg = np.polyder(g)
    for _ in range(iters):
        d = np.polyval(dg, x) if len(dg) else 0.0
        if d == 0.0:
            break
        step = np.polyval(g, x) / d
        if not np.isfinite(step) or step == 0.0:
            break
        x -= step
    return float(x)


def find_ratios(H: HomogeneousNonlinearity) -> list[ProportionalRatio]:
    g = ratio_polynomial(H)
    if not np.any(g):
        raise ContinuumOfRatios("ratio polynomial is identically zero; supply mu explicitly")
    candidates = []
    # np.roots is the companion-matrix eigenvalue method; trailing zeros become exact zero roots
    for grp in _clusters(np.roots(g)):
        z = complex(np.mean(grp))
        if abs(z.imag) > REALNESS_TOL * (1.0 + abs(z.real)):
            continue
        # a root of multiplicity m is a simple root of the (m-1)-th derivative
        x = _newton(np.polyder(g, len(grp) - 1) if len(grp) > 1 else g, z.real)
        if ratio_residual(H, x) <= RESIDUAL_TOL:
            candidates.append(x)
    candidates.sort()
    roots: list[float] = []
    for x in candidates:
        if roots and abs(x - roots[-1]) <= DEDUP_TOL * (1.0 + abs(x)):
            continue
        roots.append(0.0 if x == 0.0 else x)
    if not roots:
        raise EmptySpectrumOfRoots("no real mu satisfies H_v(1,mu) = mu H_u(1,mu)")
    return [_ratio_for(H, mu) for mu in roots]


def hessian_identities_residual(H: HomogeneousNonlinearity, mu: float) -> tuple[float, float]:
    """Residuals of H_uu + mu H_uv = (p+1) H_u and H_uv + mu H_vv = (p+1) mu H_u at (1, mu)."""
    hu = float(grad_H(H, 1.0, mu)[0])
    (huu, huv), (_, hvv) = hessian_H(H, 1.0, mu)
    p1 = H.p + 1
    return abs(huu + mu * huv - p1 * hu), abs(huv + mu * hvv - p1 * mu * hu)


def example1(p: int, b1: float, b2: float) -> HomogeneousNonlinearity:
    """b1 (u^{p+2}+v^{p+2})/((p+1)(p+2)) + b2 (u^{p+1} v + u v^{p+1})/(p+1)."""
    a = b1 / ((p + 1) * (p + 2))
    return HomogeneousNonlinearity.from_terms(p, {p + 2: a, 0: a, p + 1: b2 / (p + 1), 1: b2 / (p + 1)})


def example2(q: int) -> HomogeneousNonlinearity:
    """u^{q+1} v^{q+1} / (q+1); the degree is 2q+2, so p = 2q."""
    return HomogeneousNonlinearity.from_terms(2 * q, {q + 1: 1.0 / (q + 1)})


def example3(p: int, a: float, b: float) -> HomogeneousNonlinearity:
    """Decoupled (A u^{p+2} + B v^{p+2}) / (p+2)."""
    return HomogeneousNonlinearity.from_terms(p, {p + 2: a / (p + 2), 0: b / (p + 2)})


def example4(beta: float) -> HomogeneousNonlinearity:
    """u^4/4 + beta u^2 v^2 / 2 + v^4/4."""
    return HomogeneousNonlinearity.from_terms(2, {4: 0.25, 2: beta / 2, 0: 0.25})

