"""Minimum-power allocation for a two-hop decode-and-forward relay link.

Finds the smallest constant powers (kappa1, kappa2) such that the end-to-end
delay-bound violation probability stays below its target.  The solution
equalizes the two hops' delay-tail decay rates at the value demanded by the
QoS target and proceeds in two steps:

1. theta1 follows in closed form from the traffic load and the QoS target;
   kappa1 is the unique power at which hop 1's effective capacity carries the
   offered load at exponent theta1.
2. theta2 is the unique root of theta * A_SR(theta, kappa1) = u, where A_SR
   is the effective bandwidth of hop 1's service process (hop 2's arrivals);
   kappa2 then equates hop 2's effective capacity to that bandwidth.

Every scalar equation is solved by bracketed root finding on a map that the
effective-capacity properties guarantee to be strictly monotone, so the
procedure is globally convergent and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from scipy import optimize

from .effcap import (
    LinkModel,
    effective_bandwidth_service_rayleigh,
    effective_capacity_rayleigh,
)
from .specfun import qos_rate_target

__all__ = [
    "Scenario",
    "Allocation",
    "InfeasibleError",
    "solve_theta1",
    "solve_kappa1",
    "solve_theta2",
    "solve_kappa2",
    "allocate",
]

# Initial power bracket, grown geometrically up to the ceiling.
POWER_BRACKET_LO = 1e-6
POWER_BRACKET_HI = 1.0
DEFAULT_POWER_CEILING = 1e6

# theta2 search is bracketed upward from here; theta*A(theta) -> 0 as
# theta -> 0, so the left end is always below the target.
_THETA_BRACKET_LO = 1e-12
_THETA_BRACKET_HI = 1.0
_THETA_CEILING = 1e4

_ROOT_RTOL = 4.0 * 2.220446049250313e-16


class InfeasibleError(RuntimeError):
    """No feasible power within the configured bracket ceiling."""

    def __init__(self, step: str, message: str):
        super().__init__(f"{step}: {message}")
        self.step = step


@dataclass(frozen=True)
class Scenario:
    """One problem instance, in per-frame units.

    Attributes
    ----------
    traffic_load : float
        Constant arrival rate at the source, nats/frame.
    delay_bound : float
        End-to-end delay bound, frames.
    violation_prob : float
        Maximum tolerable P(delay > bound), in (0, 1).
    hop1_mean_gain, hop2_mean_gain : float
        Mean channel power gains of the two hops.
    bt_product : float
        Bandwidth-time product shared by both hops.
    """

    traffic_load: float
    delay_bound: float
    violation_prob: float
    hop1_mean_gain: float = 1.0
    hop2_mean_gain: float = 1.0
    bt_product: float = 200.0

    def __post_init__(self):
        for name in ("delay_bound", "hop1_mean_gain", "hop2_mean_gain", "bt_product"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        # zero load is allowed for simulation (nothing to tag); the allocator
        # rejects it
        if not self.traffic_load >= 0.0:
            raise ValueError(f"traffic_load must be >= 0, got {self.traffic_load!r}")
        if not 0.0 < self.violation_prob < 1.0:
            raise ValueError(
                f"violation_prob must lie in (0, 1), got {self.violation_prob!r}")


@dataclass(frozen=True)
class Allocation:
    """Solver output: powers, QoS exponents, delay rate and closure residuals.

    ``residuals`` maps each constraint to its relative closure error:
    ``load``  |C_SR(theta1, kappa1) - A| / A,
    ``rate_match``  |theta1*C_SR - theta2*C_RD| / u,
    ``qos_rate``  |theta1*C_SR - u| / u,
    ``bandwidth_match``  |A_SR(theta2, kappa1) - C_RD(theta2, kappa2)| / A_SR.
    """

    kappa1: float
    kappa2: float
    theta1: float
    theta2: float
    delay_rate: float
    residuals: dict[str, float] = field(default_factory=dict)

    @property
    def total_power(self) -> float:
        return self.kappa1 + self.kappa2


def _hop1_link(kappa: float, scenario: Scenario) -> LinkModel:
    return LinkModel(kappa, scenario.hop1_mean_gain, scenario.bt_product)


def _hop2_link(kappa: float, scenario: Scenario) -> LinkModel:
    return LinkModel(kappa, scenario.hop2_mean_gain, scenario.bt_product)


def _solve_power(step: str, f, ceiling: float) -> float:
    """Root of a strictly increasing f(kappa) via geometric bracket growth.

    The bracket starts at [POWER_BRACKET_LO, POWER_BRACKET_HI]; the high end
    grows toward ``ceiling`` until the sign changes, the low end shrinks for
    vanishing targets.
    """
    lo, hi = POWER_BRACKET_LO, POWER_BRACKET_HI
    f_lo = f(lo)
    while f_lo > 0.0:
        lo /= 32.0
        if lo < 1e-280:
            raise InfeasibleError(step, "required power underflows to zero")
        f_lo = f(lo)
    f_hi = f(hi)
    while f_hi < 0.0:
        hi *= 8.0
        if hi > ceiling:
            raise InfeasibleError(
                step, f"no solution below the power ceiling {ceiling:g}")
        f_hi = f(hi)
    return optimize.brentq(f, lo, hi, xtol=1e-300, rtol=_ROOT_RTOL, maxiter=300)


def solve_theta1(scenario: Scenario) -> float:
    """Hop-1 QoS exponent: the target delay rate per nat of offered load."""
    if scenario.traffic_load == 0.0:
        raise ValueError("cannot allocate power for zero traffic load")
    return qos_rate_target(scenario.delay_bound,
                           scenario.violation_prob) / scenario.traffic_load


def solve_kappa1(theta1: float, scenario: Scenario,
                 power_ceiling: float = DEFAULT_POWER_CEILING) -> float:
    """Hop-1 power: effective capacity at theta1 equals the traffic load."""
    if not theta1 > 0.0:
        raise ValueError(f"theta1 must be > 0, got {theta1!r}")
    load = scenario.traffic_load

    def gap(kappa: float) -> float:
        return effective_capacity_rayleigh(theta1, _hop1_link(kappa, scenario)) - load

    return _solve_power("solve_kappa1", gap, power_ceiling)


def solve_theta2(kappa1: float, scenario: Scenario) -> float:
    """Hop-2 QoS exponent: root of theta * A_SR(theta, kappa1) = u.

    theta * A(theta) is the log-moment generating function of hop 1's service
    process: zero at theta -> 0, strictly increasing and unbounded, so the
    root is unique and bracketable.
    """
    u = qos_rate_target(scenario.delay_bound, scenario.violation_prob)
    link1 = _hop1_link(kappa1, scenario)

    def gap(theta: float) -> float:
        return theta * effective_bandwidth_service_rayleigh(theta, link1) - u

    lo, hi = _THETA_BRACKET_LO, _THETA_BRACKET_HI
    f_hi = gap(hi)
    while f_hi < 0.0:
        hi *= 8.0
        if hi > _THETA_CEILING:
            raise InfeasibleError(
                "solve_theta2",
                f"no root of theta*A_SR(theta) = {u:g} in [{lo:g}, {_THETA_CEILING:g}]")
        f_hi = gap(hi)
    return optimize.brentq(gap, lo, hi, xtol=1e-300, rtol=_ROOT_RTOL, maxiter=300)


def solve_kappa2(theta2: float, kappa1: float, scenario: Scenario,
                 power_ceiling: float = DEFAULT_POWER_CEILING) -> float:
    """Hop-2 power: effective capacity at theta2 matches hop 1's bandwidth."""
    if not theta2 > 0.0:
        raise ValueError(f"theta2 must be > 0, got {theta2!r}")
    target = effective_bandwidth_service_rayleigh(theta2, _hop1_link(kappa1, scenario))

    def gap(kappa: float) -> float:
        return effective_capacity_rayleigh(theta2, _hop2_link(kappa, scenario)) - target

    return _solve_power("solve_kappa2", gap, power_ceiling)


def allocate(scenario: Scenario,
             power_ceiling: float = DEFAULT_POWER_CEILING) -> Allocation:
    """Run the two-step procedure and report constraint-closure residuals."""
    u = qos_rate_target(scenario.delay_bound, scenario.violation_prob)
    theta1 = solve_theta1(scenario)
    kappa1 = solve_kappa1(theta1, scenario, power_ceiling)
    theta2 = solve_theta2(kappa1, scenario)
    kappa2 = solve_kappa2(theta2, kappa1, scenario, power_ceiling)

    c_sr = effective_capacity_rayleigh(theta1, _hop1_link(kappa1, scenario))
    c_rd = effective_capacity_rayleigh(theta2, _hop2_link(kappa2, scenario))
    a_sr = effective_bandwidth_service_rayleigh(theta2, _hop1_link(kappa1, scenario))
    residuals = {
        "load": abs(c_sr - scenario.traffic_load) / scenario.traffic_load,
        "rate_match": abs(theta1 * c_sr - theta2 * c_rd) / u,
        "qos_rate": abs(theta1 * c_sr - u) / u,
        "bandwidth_match": abs(a_sr - c_rd) / a_sr,
    }
    return Allocation(kappa1=kappa1, kappa2=kappa2, theta1=theta1,
                      theta2=theta2, delay_rate=u, residuals=residuals)
