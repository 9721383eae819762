"""Real-valued special functions used by the closed-form rate expressions.

Provides both real branches of the Lambert-W function, the upper incomplete
gamma function for arbitrary real first argument (including a <= 0, where
most libraries give up), and the inversion of the equal-rate two-hop delay
tail that turns a (delay bound, violation probability) pair into a decay
rate.

Everything here is a pure function of its arguments and safe to call
concurrently.
"""

from __future__ import annotations

import math

__all__ = [
    "lambert_w",
    "upper_incomplete_gamma",
    "log_upper_incomplete_gamma",
    "qos_rate_target",
]

_EULER = 0.5772156649015329
_EPS = 2.220446049250313e-16
_FPMIN = 1e-300
_MAX_ITER = 500

# exp() overflows above this; used to signal range errors instead of inf
_LOG_HUGE = 709.0


# ---------------------------------------------------------------------------
# Lambert W
# ---------------------------------------------------------------------------

def _w_initial_guess(x: float, branch: int, t: float) -> float:
    """Starting point for the Halley iteration.

    ``t = 1 + e*x`` is the (clipped, non-negative) distance from the branch
    point at x = -1/e.  Near the branch point both branches use the series in
    p = sqrt(2t); elsewhere the principal branch uses a rational/log seed and
    the minus-one branch the asymptotic log(-x) - log(-log(-x)) expansion.
    """
    if branch == 0:
        if x < -0.3:
            p = math.sqrt(2.0 * t)
            return -1.0 + p - p * p / 3.0 + (11.0 / 72.0) * p ** 3
        if x < 0.0:
            return x / (1.0 + x)
        if x < math.e:
            return x / math.e
        l1 = math.log(x)
        l2 = math.log(l1)
        return l1 - l2 + l2 / l1
    if x < -0.27:
        p = math.sqrt(2.0 * t)
        return -1.0 - p - p * p / 3.0 - (11.0 / 72.0) * p ** 3
    l1 = math.log(-x)
    l2 = math.log(-l1)
    return l1 - l2 + l2 / l1


def _w_bisect(x: float, branch: int) -> float:
    """Fallback: bisection on w*e^w - x, exploiting monotonicity per branch."""
    if branch == 0:
        lo, hi = -1.0, max(1.0, math.log1p(abs(x)) + 1.0)
        while hi * math.exp(hi) < x:
            hi *= 2.0
    else:
        hi = -1.0
        lo = -2.0
        while lo * math.exp(lo) - x <= 0.0:
            lo *= 2.0
            if lo < -1e6:
                break
    f_lo = lo * math.exp(lo) - x
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = mid * math.exp(mid) - x
        if (f_lo <= 0.0) == (f_mid <= 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lambert_w(x: float, branch: int = 0) -> float:
    """Real Lambert-W function, the inverse of w -> w * e^w.

    Parameters
    ----------
    x : float
        Argument.  The principal branch requires x >= -1/e; the minus-one
        branch requires -1/e <= x < 0.
    branch : int
        0 for the principal branch (W >= -1), -1 for the lower branch
        (W <= -1).

    Returns
    -------
    float
        w such that ``w * exp(w) == x`` to a relative residual of 1e-12.

    Raises
    ------
    ValueError
        If x is outside the domain of the requested branch.
    """
    if branch not in (0, -1):
        raise ValueError(f"branch must be 0 or -1, got {branch}")
    t = 1.0 + x * math.e
    if t < 0.0:
        if t < -1e-9:
            raise ValueError(f"lambert_w requires x >= -1/e, got x={x!r}")
        t = 0.0
    if branch == -1 and x >= 0.0:
        raise ValueError(f"minus-one branch requires x < 0, got x={x!r}")
    if x == 0.0:
        return 0.0
    if t == 0.0:
        return -1.0

    w = _w_initial_guess(x, branch, t)
    scale = max(abs(x), 1e-290)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= 1e-13 * scale:
            return w
        wp1 = w + 1.0
        if wp1 == 0.0:
            wp1 = 1e-12 if branch == 0 else -1e-12
        # Halley step; the w+1 factors blow up at the branch point, where the
        # initial series is already at full accuracy
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        w -= f / denom
        if branch == 0 and w < -1.0:
            w = -1.0 + 1e-12
        elif branch == -1 and w > -1.0:
            w = -1.0 - 1e-12
    w = _w_bisect(x, branch)
    if abs(w * math.exp(w) - x) > 1e-10 * scale:
        raise ValueError(f"lambert_w failed to converge for x={x!r}, branch={branch}")
    return w


# ---------------------------------------------------------------------------
# Upper incomplete gamma, real first argument
# ---------------------------------------------------------------------------

def _upper_cf_factor(a: float, z: float) -> float:
    """Modified-Lentz continued fraction H with G(a, z) = exp(-z + a*ln z) * H.

    Converges for z >= a + 1 when a > 0 and for z >= ~1 for any a <= 0.
    """
    b = z + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ValueError(f"incomplete-gamma continued fraction stalled at a={a!r}, z={z!r}")


def _log_lower_reg_series(a: float, z: float) -> float:
    """log P(a, z) by the classic power series; needs a > 0 and z <= a + 1.

    Term ratios are bounded by z/(a+1) < 1, so the geometric tail yields a
    rigorous iteration budget; for very large a with z just below a the
    series converges slowly and the budget grows accordingly.
    """
    ratio = z / (a + 1.0)
    budget = _MAX_ITER
    if ratio > 0.9:
        budget = min(100_000, int(40.0 / -math.log(ratio)) + 50)
    ap = a
    delta = 1.0 / a
    total = delta
    for _ in range(budget):
        ap += 1.0
        delta *= z / ap
        total += delta
        if abs(delta) < abs(total) * _EPS:
            return a * math.log(z) - z - math.lgamma(a) + math.log(total)
    raise ValueError(f"incomplete-gamma series stalled at a={a!r}, z={z!r}")


def _gamma1p_frac(a: float) -> float:
    """(Gamma(1 + a) - 1) / a, finite and accurate through a = 0."""
    if abs(a) < 1e-3:
        # Taylor coefficients of Gamma(1 + a) about a = 0
        return (-0.5772156649015329 + a * (0.9890559953279725
                + a * (-0.9074790760808862 + a * 0.9817280868344001)))
    return math.expm1(math.lgamma(1.0 + a)) / a


def _powm1_frac(log_z: float, a: float) -> float:
    """(z^a - 1) / a, finite and accurate through a = 0."""
    t = a * log_z
    if abs(t) < 1e-3:
        return log_z * (1.0 + t * (0.5 + t * (1.0 / 6.0 + t / 24.0)))
    return math.expm1(t) / a


def _small_a_series(a: float, z: float) -> float:
    """G(a, z) for |a| <= 0.5 and z < 1.5.

    Splits off the z^a/a singularity analytically so the result stays
    accurate straight through a = 0, where it reduces to the E1 series.
    """
    log_z = math.log(z)
    head = _gamma1p_frac(a) - _powm1_frac(log_z, a)
    term = 1.0
    tail = 0.0
    for k in range(1, _MAX_ITER):
        term *= -z / k
        contrib = term / (a + k)
        tail += contrib
        if abs(contrib) < abs(tail) * _EPS + 1e-320:
            break
    return head - math.exp(a * log_z) * tail


def _checked_exp(log_value: float, a: float, z: float) -> float:
    if log_value > _LOG_HUGE:
        raise OverflowError(
            f"upper_incomplete_gamma overflows at a={a!r}, z={z!r}; "
            "use log_upper_incomplete_gamma")
    result = math.exp(log_value)
    if result == 0.0:
        raise OverflowError(
            f"upper_incomplete_gamma underflows at a={a!r}, z={z!r}; "
            "use log_upper_incomplete_gamma")
    return result


def upper_incomplete_gamma(a: float, z: float) -> float:
    """Upper incomplete gamma G(a, z) = integral_z^inf t^(a-1) e^(-t) dt.

    Unlike the regularized library versions, ``a`` may be any real number;
    z must be positive.  Evaluation strategy:

    * a > 0: continued fraction for z >= a + 1, series otherwise (with a
      dedicated small-``a`` expansion below a = 0.5 to dodge cancellation in
      Gamma(a) * (1 - P)).
    * a <= 0, z >= 1.5: the continued fraction, which stays machine-accurate
      for negative parameters.
    * a <= 0, z < 1.5: downward recurrence G(a, z) = (G(a+1, z) - z^a e^-z)/a,
      seeded in (-0.5, 0.5] by the small-``a`` expansion so no divisor comes
      near zero.  In this region every step is well conditioned.

    Raises
    ------
    ValueError
        If z <= 0.
    OverflowError
        If the (strictly positive) result is outside double range.
    """
    if not z > 0.0:
        raise ValueError(f"upper_incomplete_gamma requires z > 0, got z={z!r}")
    if a > 0.0:
        if z >= a + 1.0:
            return _checked_exp(
                -z + a * math.log(z) + math.log(_upper_cf_factor(a, z)), a, z)
        if a <= 0.5 and z < 1.5:
            return _small_a_series(a, z)
        p = math.exp(_log_lower_reg_series(a, z))
        return _checked_exp(
            math.lgamma(a) + math.log1p(-min(p, 1.0 - 1e-17)), a, z)
    if z >= 1.5:
        return _checked_exp(
            -z + a * math.log(z) + math.log(_upper_cf_factor(a, z)), a, z)
    log_z = math.log(z)
    steps = round(-a)
    b = a + steps
    g = _small_a_series(b, z)
    for _ in range(steps):
        b -= 1.0
        power = b * log_z - z
        g = (g - (math.exp(power) if power > -745.0 else 0.0)) / b
        # a vanishing or negative iterate means the (strictly positive) value
        # left double range: overflow for z < 1, underflow for z > 1
        if not (math.isfinite(g) and g > 0.0):
            raise OverflowError(
                f"upper_incomplete_gamma not representable at a={a!r}, z={z!r}; "
                "use log_upper_incomplete_gamma")
    return g


def log_upper_incomplete_gamma(a: float, z: float) -> float:
    """log G(a, z), usable where G itself over- or underflows (large z or a).

    For z beyond the continued-fraction threshold the logarithm is assembled
    term by term and never forms e^z or e^-z explicitly, which is what the
    rate formulas need when 1/kappa is large.
    """
    if not z > 0.0:
        raise ValueError(f"log_upper_incomplete_gamma requires z > 0, got z={z!r}")
    if a > 0.0:
        if z >= a + 1.0:
            return -z + a * math.log(z) + math.log(_upper_cf_factor(a, z))
        if a <= 0.5 and z < 1.5:
            return math.log(_small_a_series(a, z))
        p = math.exp(_log_lower_reg_series(a, z))
        return math.lgamma(a) + math.log1p(-min(p, 1.0 - 1e-17))
    if z >= 1.5:
        return -z + a * math.log(z) + math.log(_upper_cf_factor(a, z))
    try:
        return math.log(upper_incomplete_gamma(a, z))
    except OverflowError:
        # the value itself is outside double range (deeply negative a); the
        # continued fraction converges precisely in that regime
        try:
            return -z + a * math.log(z) + math.log(_upper_cf_factor(a, z))
        except ValueError:
            raise OverflowError(
                f"log_upper_incomplete_gamma failed at a={a!r}, z={z!r}") from None


# ---------------------------------------------------------------------------
# QoS delay-rate target
# ---------------------------------------------------------------------------

def qos_rate_target(delay_bound: float, xi: float) -> float:
    """Per-frame delay-tail decay rate meeting a two-hop violation target.

    Returns the unique u > 0 with ``(1 + u * delay_bound) * exp(-u *
    delay_bound) == xi``, i.e. the rate at which the equal-rate two-hop delay
    CCDF hits ``xi`` exactly at ``delay_bound``.  Computed as
    ``-(1 + W_{-1}(-xi/e)) / delay_bound``; only the minus-one branch gives a
    positive rate for xi < 1.

    Parameters
    ----------
    delay_bound : float
        Delay bound in frames, > 0.
    xi : float
        Maximum violation probability, in (0, 1).
    """
    if not delay_bound > 0.0:
        raise ValueError(f"delay_bound must be > 0, got {delay_bound!r}")
    if not 0.0 < xi < 1.0:
        raise ValueError(f"xi must lie in (0, 1), got {xi!r}")
    v = -1.0 - lambert_w(-xi / math.e, branch=-1)
    # one Newton polish on log((1+v)/xi) = v pins the residual to ~1 ulp
    if v > 1e-8:
        for _ in range(2):
            g = math.log1p(v) - math.log(xi) - v
            v += g * (1.0 + v) / v
    return v / delay_bound
