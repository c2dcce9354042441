"""The 2x2 criterion matrix M = Hess H(1, mu) / ((p+1) H_u(1, mu)) and the stability verdict."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .nonlinearity import HomogeneousNonlinearity, ProportionalRatio, hessian_H


class NotAdmissible(ValueError):
    """H_u(1, mu) <= 0: no proportional wave, M is undefined."""


class MissingThreshold(ValueError):
    """p > 4 and the criterion holds, but no omega_p was supplied."""


class VerdictKind(str, Enum):
    STABLE_ALL_SPEEDS = "StableAllSpeeds"
    THRESHOLD_STABLE = "ThresholdStable"
    CRITERION_FAILS = "CriterionFails"
    NOT_ADMISSIBLE = "NotAdmissible"


@dataclass(frozen=True)
class CriterionMatrix:
    entries: np.ndarray
    det: float
    eigvals: tuple[float, float]
    orthogonal: np.ndarray
    p: int = field(default=1)
    mu: float = field(default=0.0)

    def transformed(self) -> np.ndarray:
        """O^T M O, which should be diag(1, det M)."""
        return self.orthogonal.T @ self.entries @ self.orthogonal


@dataclass(frozen=True)
class StabilityVerdict:
    kind: VerdictKind
    detM: float
    bound: float
    omega_p: float | None = None


def _positive_first(col: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(col) > 0.0)
    if nz.size and col[nz[0]] < 0:
        return -col
    return col


def build_M(H: HomogeneousNonlinearity, ratio: ProportionalRatio) -> CriterionMatrix:
    if not ratio.admissible or ratio.hu <= 0.0:
        raise NotAdmissible(f"H_u(1, {ratio.mu}) = {ratio.hu} is not positive")
    mu = ratio.mu
    M = hessian_H(H, 1.0, mu) / ((H.p + 1) * ratio.hu)
    M = 0.5 * (M + M.T)
    det = float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    # (1, mu) is always an eigenvector for eigenvalue 1; its complement carries det M
    if np.allclose(M, np.eye(2), rtol=0.0, atol=1e-12):
        O = np.eye(2)
    else:
        e1 = np.array([1.0, mu]) / np.hypot(1.0, mu)
        e2 = _positive_first(np.array([-e1[1], e1[0]]))
        O = np.column_stack([e1, e2])
    return CriterionMatrix(entries=M, det=det, eigvals=(1.0, det), orthogonal=O, p=H.p, mu=mu)


def stability_bound(p: int) -> float:
    return 1.0 / (p + 1)


def verdict(M: CriterionMatrix, p: int, omega_p: float | None = None) -> StabilityVerdict:
    bound = stability_bound(p)
    if not M.det < bound:
        # boundary det M == 1/(p+1) included: the hypothesis is strict
        return StabilityVerdict(VerdictKind.CRITERION_FAILS, M.det, bound)
    if p <= 4:
        return StabilityVerdict(VerdictKind.STABLE_ALL_SPEEDS, M.det, bound)
    if omega_p is None:
        raise MissingThreshold(f"p={p} > 4 needs the threshold speed omega_p")
    return StabilityVerdict(VerdictKind.THRESHOLD_STABLE, M.det, bound, omega_p=float(omega_p))


def not_admissible_verdict(p: int) -> StabilityVerdict:
    return StabilityVerdict(VerdictKind.NOT_ADMISSIBLE, float("nan"), stability_bound(p))


def example1_bound(p: int, b2: float) -> float:
    """Upper end of the b1 stability interval for Example 1 at mu = 1, as printed: -(p+1)(p-3) b2 / p."""
    if b2 <= 0:
        raise ValueError("b2 must be positive")
    return -(p + 1) * (p - 3) * b2 / p


def example1_bound_exact(p: int, b2: float) -> float:
    """The b1 threshold actually implied by det M < 1/(p+1) with H_u > 0: (-p^2 + 2p + 4) b2 / p.

    Differs from :func:`example1_bound` by b2/p.
    """
    if b2 <= 0:
        raise ValueError("b2 must be positive")
    return (-p * p + 2 * p + 4) * b2 / p


def example1_det(p: int, b1: float, b2: float) -> float:
    """Closed-form det M for Example 1 at mu = 1."""
    return ((b1 + p * b2) ** 2 - 4 * b2 ** 2) / (b1 + (p + 2) * b2) ** 2
