"""Error-function kernel shared by every profile computation.

The basic object is the increasing function

    heat_step(x) = (1 / (2 sqrt(pi))) * int_{-inf}^{x} exp(-s^2/4) ds
                 = (1 + erf(x/2)) / 2,

the self-similar shape taken by the constant-diffusivity heat equation with
unit step data; ``heat_step(x / a)`` is the same shape for diffusivity a^2.
Everything transcendental in the solver reduces to this function, its
derivative, and logarithms of its differences, so those live here once with
tail-safe branches: differences of nearly-equal tail values are computed
through the scaled complementary error function in log space rather than by
naive subtraction, which keeps objective gradients finite far into the
Gaussian tails.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erf, erfc, erfcx, erfinv

_LOG_2_SQRT_PI = math.log(2.0 * math.sqrt(math.pi))
_LN2 = math.log(2.0)


def heat_step(x: float) -> float:
    """Cumulative Gaussian profile, increasing from 0 at -inf to 1 at +inf.

    The left tail goes through erfc so that tiny values keep full relative
    accuracy; the right tail only needs absolute accuracy.
    """
    if math.isnan(x):
        return math.nan
    if x < 0.0:
        return 0.5 * float(erfc(-0.5 * x))
    return 0.5 * (1.0 + float(erf(0.5 * x)))


def heat_step_vec(x) -> np.ndarray:
    """Vectorized heat_step for sampling profiles on grids."""
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(x < 0.0, 0.5 * erfc(-0.5 * x), 0.5 * (1.0 + erf(0.5 * x)))


def heat_step_deriv(x: float) -> float:
    """d/dx of heat_step: exp(-x^2/4) / (2 sqrt(pi)); even, maximal at 0."""
    return math.exp(-0.25 * x * x - _LOG_2_SQRT_PI)


def log_heat_step_deriv(x: float) -> float:
    """log of heat_step_deriv in closed form; never under- or overflows."""
    return -0.25 * x * x - _LOG_2_SQRT_PI


def _log_erfc(t: float) -> float:
    # ln(erfc(t)) for finite t; the t > 0 tail goes through erfcx.
    if t <= 0.0:
        return math.log(float(erfc(t)))
    return -t * t + math.log(float(erfcx(t)))


def _log_flat_diff(x: float, y: float) -> float:
    # Arguments one or two floats apart: one-point rectangle at the midpoint.
    return log_heat_step_deriv(0.5 * (x + y)) + math.log(x - y)


def _log_upper_tail_diff(a: float, b: float, x: float, y: float) -> float:
    # ln((erfc(b) - erfc(a)) / 2) for 0 <= b < a.  (x, y) kept for fallback.
    log_eb = _log_erfc(b)
    if math.isinf(a):
        return log_eb - _LN2
    # s = ln(erfc(a)/erfc(b)) < 0, assembled from well-scaled pieces;
    # -expm1(s) is then 1 - erfc(a)/erfc(b) without cancellation.
    s = (b * b - a * a) + math.log(float(erfcx(a))) - math.log(float(erfcx(b)))
    if s >= 0.0:
        return _log_flat_diff(x, y)
    return log_eb + math.log(-math.expm1(s)) - _LN2


def log_heat_step_diff(x: float, y: float) -> float:
    """ln(heat_step(x) - heat_step(y)) for x > y, finite for all finite x > y.

    Same-sign arguments are handled entirely in log space through erfcx, so
    the result stays accurate when both points sit far out in one Gaussian
    tail; straddling arguments add two positive erf values and cannot cancel.
    Infinite arguments are allowed on their natural side.  Always <= 0.
    """
    if not x > y:
        raise ValueError(f"log_heat_step_diff requires x > y, got x={x!r}, y={y!r}")
    if math.isinf(x) and math.isinf(y):
        return 0.0
    a = 0.5 * x
    b = 0.5 * y
    if b >= 0.0:
        return _log_upper_tail_diff(a, b, x, y)
    if a <= 0.0:
        return _log_upper_tail_diff(-b, -a, -y, -x)
    # arguments straddle zero: a sum of two positive terms
    p = 0.5 * (float(erf(a)) + float(erf(-b)))
    if p <= 0.0:  # both arguments subnormal
        return _log_flat_diff(x, y)
    if p >= 1.0:
        return 0.0
    return math.log(p)


def _log_heat_step(x: float) -> float:
    # ln(heat_step(x)), accurate arbitrarily far into the left tail.
    return log_heat_step_diff(x, -math.inf)


def _inverse_log_tail(p: float) -> float:
    # Quantiles far below working precision: Newton on ln(heat_step) with an
    # asymptotic start from heat_step(x) ~ heat_step'(x) * 2/|x| as x -> -inf.
    target = math.log(p)
    t = max(-target - _LOG_2_SQRT_PI, 1.0)
    x = -2.0 * math.sqrt(t)
    for _ in range(2):
        x = -2.0 * math.sqrt(max(-target - _LOG_2_SQRT_PI + math.log(2.0 / abs(x)), 1.0))
    for _ in range(80):
        g = _log_heat_step(x) - target
        if abs(g) <= 1e-13:
            break
        slope = math.exp(log_heat_step_deriv(x) - _log_heat_step(x))
        step = g / slope
        if step > 5.0:
            step = 5.0
        elif step < -5.0:
            step = -5.0
        x -= step
    return x


def heat_step_inverse(p: float) -> float:
    """x such that heat_step(x) = p for 0 < p < 1 (|heat_step(x) - p| <= 1e-12).

    Safeguarded Newton from an inverse-erf start; quantiles below working
    precision switch to a log-space Newton so the whole open interval works.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"heat_step_inverse requires 0 < p < 1, got {p!r}")
    if p < 1e-15:
        return _inverse_log_tail(p)
    x = 2.0 * float(erfinv(2.0 * p - 1.0))
    for _ in range(6):
        f = heat_step(x) - p
        if f == 0.0:
            break
        step = f / heat_step_deriv(x)
        if step > 1.0:  # erfinv start is close; clamp paranoid steps
            step = 1.0
        elif step < -1.0:
            step = -1.0
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x
