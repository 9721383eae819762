"""Analytical delay distributions for one hop and for two hops in tandem.

Each hop's queueing delay is modelled as exponential with rate
``theta * C(theta)`` (the large-deviation tail approximation, treated here as
exact).  The end-to-end delay is then the sum of two independent
exponentials: hypoexponential for distinct rates, Erlang-2 shaped when the
rates coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .specfun import qos_rate_target

__all__ = [
    "HopDelayLaw",
    "single_hop_ccdf",
    "single_hop_pdf",
    "two_hop_ccdf",
    "two_hop_tail_exponent",
    "invert_equal_rate_ccdf",
]

# Relative rate gap below which the hypoexponential form has lost ~6 digits
# to cancellation and the equal-rate form takes over.
EQUAL_RATE_THRESHOLD = 1e-6


@dataclass(frozen=True)
class HopDelayLaw:
    """Exponential delay law of one hop: P(D > x) = exp(-rate * x)."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ValueError(f"delay rate must be > 0, got {self.rate!r}")


def single_hop_ccdf(law: HopDelayLaw, x: float) -> float:
    """P(D > x) for one hop, x in frames."""
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    return math.exp(-law.rate * x)


def single_hop_pdf(law: HopDelayLaw, x: float) -> float:
    """Delay density rate * exp(-rate * x) of one hop."""
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    return law.rate * math.exp(-law.rate * x)


def two_hop_ccdf(law1: HopDelayLaw, law2: HopDelayLaw, x: float) -> float:
    """P(D1 + D2 > x) for independent exponential hop delays.

    Uses the hypoexponential form (a*e^{-bx} - b*e^{-ax}) / (a - b) when the
    rates differ, switching to the equal-rate form (1 + a*x) * e^{-a*x} at the
    mean rate once |a - b| / max(a, b) drops below ``EQUAL_RATE_THRESHOLD``.
    """
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    a, b = law1.rate, law2.rate
    if abs(a - b) / max(a, b) < EQUAL_RATE_THRESHOLD:
        mean_rate = 0.5 * (a + b)
        ax = mean_rate * x
        return (1.0 + ax) * math.exp(-ax)
    return (a * math.exp(-b * x) - b * math.exp(-a * x)) / (a - b)


def two_hop_tail_exponent(law1: HopDelayLaw, law2: HopDelayLaw) -> float:
    """Asymptotic decay rate of the end-to-end CCDF: the slower hop's rate."""
    return min(law1.rate, law2.rate)


def invert_equal_rate_ccdf(delay_bound: float, xi: float) -> HopDelayLaw:
    """Per-hop law whose equal-rate two-hop CCDF equals xi at the delay bound."""
    return HopDelayLaw(rate=qos_rate_target(delay_bound, xi))
