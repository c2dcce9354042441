"""Stability of proportional solitary waves in coupled BBM systems with homogeneous nonlinearity."""

from .criterion import CriterionMatrix, StabilityVerdict, VerdictKind, build_M, verdict
from .moment import MomentConstants, moment_constants, omega_threshold
from .nonlinearity import HomogeneousNonlinearity, ProportionalRatio, find_ratios, make_ratio
from .profile import WaveProfile

__all__ = [
    "CriterionMatrix", "HomogeneousNonlinearity", "MomentConstants", "ProportionalRatio", "StabilityVerdict",
    "VerdictKind", "WaveProfile", "build_M", "find_ratios", "make_ratio", "moment_constants",
    "omega_threshold", "verdict",
]
__version__ = "0.1.0"
