"""Closed-form formulas for dephasing decay, reneging deadlines, and swap composition."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

# F(t) > 1/2 for every finite t, but e^(-2*gamma*t) underflows past ~1e-16 and
# the sum would round to exactly 0.5; the nearest double above 0.5 is the
# correctly-rounded-up value (error < 1 ulp) and keeps the range open.
_JUST_ABOVE_HALF = math.nextafter(0.5, 1.0)


def _decayed(exponent: float) -> float:
    f = 0.5 * (1.0 + math.exp(-2.0 * exponent))
    return f if f > 0.5 else _JUST_ABOVE_HALF


def fidelity_at(t: float, gamma: float) -> float:
    """Bell-pair fidelity after storing for time t in a memory dephasing at rate gamma.

    F(t) = (1 + e^(-2*gamma*t)) / 2, so F(0) = 1 and F decays toward 1/2.
    """
    if t < 0:
        raise ParameterError(f"storage time must be >= 0, got {t}")
    if gamma < 0:
        raise ParameterError(f"dephasing rate must be >= 0, got {gamma}")
    return _decayed(gamma * t)


def renege_time(f_threshold: float, gamma: float) -> float:
    """Longest storage time before fidelity falls below f_threshold.

    T = -ln(2F - 1) / (2*gamma). gamma = 0 returns math.inf (never renege);
    f_threshold = 1 returns 0 (any storage is too much). Thresholds at or below
    1/2 have no finite deadline and are rejected.
    """
    if not 0.5 < f_threshold <= 1.0:
        raise ParameterError(f"fidelity threshold must be in (0.5, 1], got {f_threshold}")
    if gamma < 0:
        raise ParameterError(f"dephasing rate must be >= 0, got {gamma}")
    if gamma == 0.0:
        return math.inf
    if f_threshold == 1.0:
        return 0.0
    return -math.log(2.0 * f_threshold - 1.0) / (2.0 * gamma)


def compose_swap_fidelity(t1: float, t2: float, gamma: float, gamma2: float | None = None) -> float:
    """End-to-end fidelity after an ideal swap of two pairs stored for t1 and t2.

    Under pure dephasing the off-diagonal decay factors multiply, so the
    exponents add: the result is the single-pair curve evaluated at
    gamma*t1 + gamma2*t2. Pass gamma2 when the two memories dephase at
    different rates.
    """
    if t1 < 0 or t2 < 0:
        raise ParameterError(f"storage times must be >= 0, got ({t1}, {t2})")
    g2 = gamma if gamma2 is None else gamma2
    if gamma < 0 or g2 < 0:
        raise ParameterError(f"dephasing rates must be >= 0, got ({gamma}, {g2})")
    return _decayed(gamma * t1 + g2 * t2)


@dataclass(frozen=True)
class DephasingModel:
    """Memory noise parameters: decay rate and the delivery fidelity target."""

    gamma: float
    f_threshold: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ParameterError(f"dephasing rate must be >= 0, got {self.gamma}")
        if not 0.5 < self.f_threshold <= 1.0:
            raise ParameterError(f"fidelity threshold must be in (0.5, 1], got {self.f_threshold}")

    @property
    def renege_time(self) -> float:
        return renege_time(self.f_threshold, self.gamma)

    def fidelity_at(self, t: float) -> float:
        return fidelity_at(t, self.gamma)


@dataclass(frozen=True)
class BsmModel:
    """Bell-state measurement outcome model: succeed with probability q_success."""

    q_success: float

    def __post_init__(self):
        if not 0.0 <= self.q_success <= 1.0:
            raise ParameterError(f"BSM success probability must be in [0, 1], got {self.q_success}")
