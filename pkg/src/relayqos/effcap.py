"""Effective bandwidth and effective capacity of the per-hop rate processes.

A hop transmits at the Shannon rate ``BT * ln(1 + kappa * h)`` nats per frame
with ``h`` exponentially distributed (Rayleigh power gain), i.i.d. across
frames.  For a QoS exponent theta > 0 the log-moment generating function of
that rate has a closed form in the upper incomplete gamma function; this
module provides the closed forms, the constant-arrival special case, and an
independent adaptive-quadrature oracle used to cross-check them.

The mean gain is absorbed into an effective SNR ``kappa * mean_gain``: for an
exponential gain this substitution is exact, so all formulas below are
written for unit-mean fading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .specfun import _upper_cf_factor, log_upper_incomplete_gamma

__all__ = [
    "LinkModel",
    "effective_capacity_rayleigh",
    "effective_bandwidth_service_rayleigh",
    "effective_bandwidth_constant",
    "effective_capacity_oracle",
    "effective_bandwidth_oracle",
    "ergodic_rate",
]

# Below this theta the closed forms are ill-conditioned (log of a moment that
# is 1 + O(theta)); both closed forms and oracles return the ergodic limit.
THETA_ERGODIC_LIMIT = 1e-8

_QUAD_TOL = 1e-12


@dataclass(frozen=True)
class LinkModel:
    """One hop's constant transmit power and Rayleigh channel statistics.

    Attributes
    ----------
    tx_power : float
        Constant transmit power kappa in linear units (noise power = 1).
    mean_gain : float
        Mean channel power gain E[h].
    bt_product : float
        Bandwidth-time product B*T: rate per frame is bt_product * ln(1 + snr).
    """

    tx_power: float
    mean_gain: float
    bt_product: float

    def __post_init__(self):
        if not self.tx_power > 0.0:
            raise ValueError(f"tx_power must be > 0, got {self.tx_power!r}")
        if not self.mean_gain > 0.0:
            raise ValueError(f"mean_gain must be > 0, got {self.mean_gain!r}")
        if not self.bt_product > 0.0:
            raise ValueError(f"bt_product must be > 0, got {self.bt_product!r}")

    @property
    def effective_snr(self) -> float:
        """kappa * mean_gain, the only combination the rate statistics see."""
        return self.tx_power * self.mean_gain


def _require_positive_theta(theta: float) -> None:
    if not theta > 0.0:
        raise ValueError(f"theta must be > 0, got {theta!r}")


def _log_rate_moment(s: float, z: float) -> float:
    """log E[(1 + h/z)^s] for unit-mean exponential h, with z = 1/effective_snr.

    Equals ``z - s*ln z + ln G(1+s, z)``.  When the continued fraction
    applies the e^z factor cancels exactly against the gamma prefactor, so
    the value is assembled as ``ln z + ln H`` and never overflows.
    """
    a = 1.0 + s
    if z >= max(1.5, a + 1.0):
        return math.log(z) + math.log(_upper_cf_factor(a, z))
    return z - s * math.log(z) + log_upper_incomplete_gamma(a, z)


def effective_capacity_rayleigh(theta: float, link: LinkModel) -> float:
    """Effective capacity -(1/theta) * log E[exp(-theta * R)] in nats/frame.

    The maximum constant arrival rate the hop's service process supports at
    QoS exponent theta.  Strictly decreasing in theta, increasing in power,
    and bounded above by the ergodic rate.
    """
    _require_positive_theta(theta)
    if theta < THETA_ERGODIC_LIMIT:
        return ergodic_rate(link)
    beta = link.bt_product * theta
    value = -_log_rate_moment(-beta, 1.0 / link.effective_snr) / theta
    if not math.isfinite(value):
        raise OverflowError(
            f"effective capacity not representable at theta={theta!r}, link={link!r}")
    return value


def effective_bandwidth_service_rayleigh(theta: float, link: LinkModel) -> float:
    """Effective bandwidth (1/theta) * log E[exp(theta * R)] in nats/frame.

    Treats the hop's own service process as an arrival process (as seen by
    the downstream queue).  Strictly increasing in theta and bounded below by
    the ergodic rate.
    """
    _require_positive_theta(theta)
    if theta < THETA_ERGODIC_LIMIT:
        return ergodic_rate(link)
    beta = link.bt_product * theta
    value = _log_rate_moment(beta, 1.0 / link.effective_snr) / theta
    if not math.isfinite(value):
        raise OverflowError(
            f"effective bandwidth not representable at theta={theta!r}, link={link!r}")
    return value


def effective_bandwidth_constant(theta: float, rate: float) -> float:
    """Effective bandwidth of a constant-rate arrival process: the rate itself."""
    _require_positive_theta(theta)
    if rate < 0.0:
        raise ValueError(f"rate must be >= 0, got {rate!r}")
    return rate


# ---------------------------------------------------------------------------
# Quadrature oracles
# ---------------------------------------------------------------------------

def _log_rate_moment_quadrature(s: float, snr: float) -> float:
    """log E[(1 + snr*h)^s] by adaptive quadrature against the Exp(1) density.

    The integrand is rescaled by its peak value so arbitrarily large moments
    are integrated without overflow.
    """
    def log_integrand(h: float) -> float:
        return s * math.log1p(snr * h) - h

    h_star = max((s * snr - 1.0) / snr, 0.0) if s > 0.0 else 0.0
    g_star = log_integrand(h_star)
    out = integrate.quad(
        lambda h: math.exp(log_integrand(h) - g_star),
        0.0, np.inf, epsabs=0.0, epsrel=_QUAD_TOL, limit=400, full_output=1)
    value, abserr = out[0], out[1]
    if not value > 0.0 or abserr > 1e-9 * value:
        raise RuntimeError(
            f"rate-moment quadrature did not converge (s={s!r}, snr={snr!r}, "
            f"value={value!r}, error estimate={abserr!r})")
    return g_star + math.log(value)


def effective_capacity_oracle(theta: float, link: LinkModel) -> float:
    """Quadrature-based effective capacity; independent of the closed form."""
    _require_positive_theta(theta)
    if theta < THETA_ERGODIC_LIMIT:
        return ergodic_rate(link)
    beta = link.bt_product * theta
    return -_log_rate_moment_quadrature(-beta, link.effective_snr) / theta


def effective_bandwidth_oracle(theta: float, link: LinkModel) -> float:
    """Quadrature-based effective bandwidth; independent of the closed form."""
    _require_positive_theta(theta)
    if theta < THETA_ERGODIC_LIMIT:
        return ergodic_rate(link)
    beta = link.bt_product * theta
    return _log_rate_moment_quadrature(beta, link.effective_snr) / theta


def ergodic_rate(link: LinkModel) -> float:
    """Mean service rate BT * E[ln(1 + snr*h)] in nats/frame, by quadrature."""
    snr = link.effective_snr
    # for small snr integrate log1p(snr*h)/snr, an O(1) quantity, so the
    # relative convergence check stays meaningful
    scale = min(snr, 1.0)
    out = integrate.quad(
        lambda h: math.log1p(snr * h) / scale * math.exp(-h),
        0.0, np.inf, epsabs=0.0, epsrel=_QUAD_TOL, limit=400, full_output=1)
    value, abserr = out[0], out[1]
    if not value > 0.0 or abserr > 1e-9 * value:
        raise RuntimeError(
            f"ergodic-rate quadrature did not converge (snr={snr!r}, "
            f"value={value!r}, error estimate={abserr!r})")
    return link.bt_product * scale * value
