"""Frame-based Monte Carlo simulation of the two-hop fluid FIFO tandem queue.

The source queue receives a constant load each frame and drains at the hop-1
Shannon rate under i.i.d. per-frame Rayleigh gains; its departures feed the
relay queue, which drains at the hop-2 rate.  Within a frame, arrivals are
credited before service (Q[t+1] = max(Q[t] + A[t] - S[t], 0)).

Delay is sampled at frame resolution: the last bit arriving in each
post-warm-up frame is tagged, and its per-hop delay is the number of whole
frames until the hop's cumulative departure curve passes the bit's cumulative
arrival index.  The relay either forwards hop-1 output to the hop-2 queue in
the next frame ("store-and-forward", the default) or within the same frame
("cut-through"); the two differ by at most one frame of end-to-end delay.

The Lindley recursion is evaluated in vectorized form (cumulative sums plus a
running minimum), and gains come from a counter-based Philox generator, so a
run is reproducible from its seed and replications with different seeds are
independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .allocator import Allocation, Scenario
from .effcap import LinkModel, ergodic_rate

__all__ = [
    "SimConfig",
    "DelayStats",
    "StabilityError",
    "InsufficientTailData",
    "simulate_tandem",
    "empirical_ccdf",
    "tail_slope",
    "suggest_fit_window",
    "FORWARDING_MODES",
]

FORWARDING_MODES = ("store-and-forward", "cut-through")

MIN_TAIL_EXCEEDANCES = 100

# Slack (in units of the per-frame load) subtracted from a tagged bit's index
# before the departure-curve search, absorbing float rounding in the queue
# recursion.  One millionth of a frame of traffic.
_INDEX_SLACK = 1e-6

_MAX_DRAIN_FRAMES = 1_000_000


class StabilityError(RuntimeError):
    """A queue's mean service rate does not exceed its arrival rate."""


class InsufficientTailData(ValueError):
    """Too few exceedances to fit a tail slope."""

    def __init__(self, achieved: int, required: int, x: float):
        super().__init__(
            f"only {achieved} exceedances beyond x={x:g} "
            f"(need >= {required}) — simulate more frames or lower x_hi")
        self.achieved = achieved
        self.required = required


@dataclass(frozen=True)
class SimConfig:
    """Simulation horizon, warm-up, seed and relay forwarding policy."""

    n_frames: int
    warmup_frames: int = 0
    seed: int = 0
    relay_forwarding: str = "store-and-forward"

    def __post_init__(self):
        if self.warmup_frames < 0:
            raise ValueError(f"warmup_frames must be >= 0, got {self.warmup_frames!r}")
        if self.n_frames <= self.warmup_frames:
            raise ValueError(
                f"n_frames ({self.n_frames!r}) must exceed warmup_frames "
                f"({self.warmup_frames!r})")
        if self.relay_forwarding not in FORWARDING_MODES:
            raise ValueError(
                f"relay_forwarding must be one of {FORWARDING_MODES}, "
                f"got {self.relay_forwarding!r}")


@dataclass(frozen=True)
class DelayStats:
    """Per-frame delay samples (whole frames) of the tagged bits."""

    hop1_delays: np.ndarray
    hop2_delays: np.ndarray
    e2e_delays: np.ndarray
    frames_simulated: int
    dropped_warmup: int

    def dump_samples(self, path, which: str = "e2e") -> None:
        """Write one integer delay sample per line for external analysis."""
        samples = {"hop1": self.hop1_delays, "hop2": self.hop2_delays,
                   "e2e": self.e2e_delays}[which]
        np.savetxt(path, samples, fmt="%d")


def _draw_gains(rng: np.random.Generator, mean_gain: float, n: int) -> np.ndarray:
    # inverse-CDF sampling of the exponential gain
    return -mean_gain * np.log1p(-rng.random(n))


def _queue_after_frames(per_frame_net: np.ndarray) -> np.ndarray:
    """Q[t+1] for Q[0] = 0 and Q[t+1] = max(Q[t] + net[t], 0), vectorized."""
    c = np.cumsum(per_frame_net)
    return c - np.minimum(np.minimum.accumulate(c), 0.0)


def _tandem_curves(load: float, s1: np.ndarray, s2: np.ndarray,
                   forwarding: str):
    """Cumulative departure curves of both hops over the main horizon.

    Returns (dep1, dep2, arr2, q1_end, q2_end) where arr2 is hop 2's
    cumulative arrival curve and the q's are the final backlogs.
    """
    n = len(s1)
    arr1 = load * np.arange(1, n + 1)
    q1 = _queue_after_frames(load - s1)
    dep1 = np.maximum.accumulate(arr1 - q1)

    if forwarding == "store-and-forward":
        arr2 = np.empty(n)
        arr2[0] = 0.0
        arr2[1:] = dep1[:-1]
    else:
        arr2 = dep1
    a2 = np.diff(arr2, prepend=0.0)
    q2 = _queue_after_frames(a2 - s2)
    dep2 = np.maximum.accumulate(arr2 - q2)
    return dep1, dep2, arr2, float(q1[-1]), float(q2[-1])


def _drain(rng: np.random.Generator, scenario: Scenario, allocation: Allocation,
           forwarding: str, q1: float, q2: float, pending: float,
           dep1_base: float, dep2_base: float):
    """Serve remaining backlog with zero fresh arrivals until both queues empty.

    Returns the cumulative departure extensions of both hops so every tagged
    bit of the main horizon has a recorded departure frame.
    """
    bt = scenario.bt_product
    dep1_ext: list[float] = []
    dep2_ext: list[float] = []
    cum1, cum2 = dep1_base, dep2_base
    tol = 1e-9 * max(scenario.traffic_load, 1.0)
    for _ in range(_MAX_DRAIN_FRAMES):
        if q1 <= tol and q2 <= tol and pending <= tol:
            break
        u = rng.random(2)
        s1 = bt * math.log1p(-allocation.kappa1 * scenario.hop1_mean_gain
                             * math.log1p(-u[0]))
        s2 = bt * math.log1p(-allocation.kappa2 * scenario.hop2_mean_gain
                             * math.log1p(-u[1]))
        served1 = min(q1, s1)
        q1 -= served1
        if forwarding == "store-and-forward":
            a2, pending = pending, served1
        else:
            a2, pending = pending + served1, 0.0
        q2 += a2
        served2 = min(q2, s2)
        q2 -= served2
        cum1 += served1
        cum2 += served2
        dep1_ext.append(cum1)
        dep2_ext.append(cum2)
    else:
        raise RuntimeError("drain phase did not empty the queues; "
                           "queues are effectively unstable")
    return np.asarray(dep1_ext), np.asarray(dep2_ext)


def simulate_tandem(scenario: Scenario, allocation: Allocation,
                    cfg: SimConfig) -> DelayStats:
    """Simulate the tandem queue and record per-hop and end-to-end delays.

    Raises
    ------
    StabilityError
        If either hop's mean service rate is at or below its mean arrival
        rate; tail statistics of an unstable queue are meaningless.
    """
    load = scenario.traffic_load
    if load == 0.0:
        empty = np.empty(0, dtype=np.int64)
        return DelayStats(empty, empty, empty, cfg.n_frames, cfg.warmup_frames)

    link1 = LinkModel(allocation.kappa1, scenario.hop1_mean_gain, scenario.bt_product)
    link2 = LinkModel(allocation.kappa2, scenario.hop2_mean_gain, scenario.bt_product)
    mean1 = ergodic_rate(link1)
    mean2 = ergodic_rate(link2)
    if mean1 <= load:
        raise StabilityError(
            f"hop 1 unstable: mean service {mean1:.6g} <= arrival {load:.6g} nats/frame")
    if mean2 <= load:
        raise StabilityError(
            f"hop 2 unstable: mean service {mean2:.6g} <= arrival {load:.6g} nats/frame")

    n = int(cfg.n_frames)
    rng = np.random.Generator(np.random.Philox(key=int(cfg.seed)))
    bt = scenario.bt_product
    s1 = bt * np.log1p(allocation.kappa1 * _draw_gains(rng, scenario.hop1_mean_gain, n))
    s2 = bt * np.log1p(allocation.kappa2 * _draw_gains(rng, scenario.hop2_mean_gain, n))

    dep1, dep2, arr2, q1_end, q2_end = _tandem_curves(
        load, s1, s2, cfg.relay_forwarding)
    del s1, s2

    pending = float(dep1[-1] - arr2[-1]) if cfg.relay_forwarding == "store-and-forward" else 0.0
    dep1_ext, dep2_ext = _drain(rng, scenario, allocation, cfg.relay_forwarding,
                                q1_end, q2_end, pending,
                                float(dep1[-1]), float(dep2[-1]))
    dep1_full = np.concatenate([dep1, dep1_ext])
    dep2_full = np.concatenate([dep2, dep2_ext])
    del dep1, dep2, arr2

    tagged = np.arange(cfg.warmup_frames, n, dtype=np.int64)
    targets = load * (tagged + 1).astype(np.float64) - _INDEX_SLACK * load
    tau1 = np.searchsorted(dep1_full, targets, side="left")
    tau2 = np.searchsorted(dep2_full, targets, side="left")
    offset = 1 if cfg.relay_forwarding == "store-and-forward" else 0

    hop1 = (tau1 - tagged).astype(np.int64)
    hop2 = (tau2 - tau1 - offset).astype(np.int64)
    e2e = (tau2 - tagged).astype(np.int64)
    return DelayStats(hop1, hop2, e2e, n, cfg.warmup_frames)


def empirical_ccdf(samples, x: float) -> tuple[float, float]:
    """Fraction of samples strictly above x, with a 95% normal half-width."""
    samples = np.asarray(samples)
    n = samples.size
    if n == 0:
        raise ValueError("empirical_ccdf needs at least one sample")
    p = np.count_nonzero(samples > x) / n
    halfwidth = 1.96 * math.sqrt(p * (1.0 - p) / n)
    return p, halfwidth


def tail_slope(samples, x_lo: float, x_hi: float) -> float:
    """Least-squares slope of -log(empirical CCDF) over integer x in [x_lo, x_hi].

    Estimates the exponential decay rate of the delay tail.  Requires at
    least ``MIN_TAIL_EXCEEDANCES`` samples beyond x_hi so the deepest point
    of the fit is statistically meaningful.
    """
    xs = np.arange(math.ceil(x_lo), math.floor(x_hi) + 1, dtype=np.float64)
    if xs.size < 2:
        raise ValueError(
            f"fit window [{x_lo:g}, {x_hi:g}] holds fewer than two integer points")
    ordered = np.sort(np.asarray(samples))
    n = ordered.size
    exceed = n - np.searchsorted(ordered, xs, side="right")
    if exceed[-1] < MIN_TAIL_EXCEEDANCES:
        raise InsufficientTailData(int(exceed[-1]), MIN_TAIL_EXCEEDANCES, float(xs[-1]))
    ccdf = exceed / n
    if ccdf.min() == ccdf.max():
        raise ValueError("degenerate CCDF: constant over the fit window")
    slope = np.polyfit(xs, -np.log(ccdf), 1)[0]
    return float(slope)


def suggest_fit_window(samples, min_exceedances: int = MIN_TAIL_EXCEEDANCES,
                       body_ccdf: float = 0.2,
                       tail_ccdf: float = 1e-3) -> tuple[int, int]:
    """Deterministic tail-fit window for :func:`tail_slope`.

    The window starts where the empirical CCDF drops below ``body_ccdf``
    (past the distribution body) and ends at the last integer delay whose
    CCDF still exceeds ``tail_ccdf`` and whose exceedance count is at least
    ``min_exceedances``.  The CCDF floor matters on long runs: below ~1e-3
    the tail of a single correlated sample path is dominated by a handful of
    busy-period excursions and the fitted slope turns noisy.
    """
    ordered = np.sort(np.asarray(samples))
    n = ordered.size
    if n == 0:
        raise ValueError("no samples")
    floor = max(min_exceedances, tail_ccdf * n)
    x_lo = 1
    while n - np.searchsorted(ordered, x_lo, side="right") > body_ccdf * n:
        x_lo += 1
    x_hi = int(ordered[-1])
    while x_hi > x_lo and n - np.searchsorted(ordered, x_hi, side="right") < floor:
        x_hi -= 1
    if x_hi < x_lo + 4:
        raise InsufficientTailData(
            int(n - np.searchsorted(ordered, x_hi, side="right")),
            min_exceedances, float(x_hi))
    return x_lo, x_hi
