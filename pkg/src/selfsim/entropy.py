"""The convex objective whose minimizer places the free boundaries.

For nominal boundaries -inf = xi_0 < xi_1 <= ... <= xi_n < xi_{n+1} = +inf
(fused pairs are equal) the objective is a sum of one term per interval:

    a_k > 0:   -a_k^2 (u_{k+1} - u_k) * ln( H(xi_{k+1}/a_k) - H(xi_k/a_k) )
    a_k = 0:    (u_{k+1} - u_k) * s_k^2 / 4

with H = heat_step and s_k the one finite boundary adjacent to the degenerate
interval (xi_1 for the left edge, xi_n for the right edge, the fused position
for an interior interval).  Every term is positive; log terms blow up as the
enclosing boundaries collapse, so the feasible set is an open barrier-guarded
region, and the whole sum is strictly convex with a symmetric tridiagonal
Hessian in the free variables.

Stationarity of the objective is exactly the set of matching conditions of
the self-similar weak solution: flux continuity across each boundary where
u is continuous, and the interface balance law where u jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import BoundaryLayout, RiemannProblem
from .special import heat_step_inverse, log_heat_step_deriv, log_heat_step_diff

_INF = math.inf


class InfeasibleBoundariesError(ValueError):
    """Raised when boundary values are not strictly increasing and finite."""


@dataclass(frozen=True)
class FreeBoundaries:
    """The m free boundary positions, strictly increasing."""

    values: tuple[float, ...]
    layout: BoundaryLayout

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def feasible_values(values) -> bool:
    v = np.asarray(values, dtype=float)
    if v.size == 0 or not np.all(np.isfinite(v)):
        return False
    return bool(np.all(np.diff(v) > 0.0)) if v.size > 1 else True


def _check(layout: BoundaryLayout, xi: FreeBoundaries) -> tuple[float, ...]:
    if len(xi.values) != layout.m:
        raise ValueError(f"expected {layout.m} free boundaries, got {len(xi.values)}")
    if layout.m == 0:
        raise ValueError("problem has no free boundaries (n = 0)")
    if not feasible_values(xi.values):
        raise InfeasibleBoundariesError(f"boundaries must be strictly increasing and finite, got {xi.values!r}")
    return xi.values


def _full_positions(layout: BoundaryLayout, values: tuple[float, ...]) -> tuple[float, ...]:
    # xi_0 .. xi_{n+1} with the infinite sentinels attached
    return (-_INF,) + layout.expand(values) + (_INF,)


def _anchor(k: int, n: int) -> int:
    # the finite boundary whose position enters a degenerate interval's term
    if k == 0:
        return 1
    if k == n:
        return n
    return k


def entropy_value(problem: RiemannProblem, layout: BoundaryLayout, xi: FreeBoundaries) -> float:
    values = _check(layout, xi)
    full = _full_positions(layout, values)
    u = problem.partition.breakpoints
    cs = problem.partition.coefficients
    n = layout.n
    total = 0.0
    for k in range(n + 1):
        du = u[k + 1] - u[k]
        a = cs[k]
        if a > 0.0:
            total -= a * a * du * log_heat_step_diff(full[k + 1] / a, full[k] / a)
        else:
            s = full[_anchor(k, n)]
            total += 0.25 * du * s * s
    return total


def entropy_gradient(
    problem: RiemannProblem, layout: BoundaryLayout, xi: FreeBoundaries
) -> np.ndarray:
    values = _check(layout, xi)
    full = _full_positions(layout, values)
    u = problem.partition.breakpoints
    cs = problem.partition.coefficients
    n = layout.n
    slots = layout.slots
    g = np.zeros(layout.m)
    for k in range(n + 1):
        du = u[k + 1] - u[k]
        a = cs[k]
        if a > 0.0:
            # d/d(xi_k)      [-a^2 du ln dH] = +a du H'(xi_k/a) / dH
            # d/d(xi_{k+1})  [-a^2 du ln dH] = -a du H'(xi_{k+1}/a) / dH
            # (ratios as exp of log differences: stable far into the tails)
            logdf = log_heat_step_diff(full[k + 1] / a, full[k] / a)
            if k >= 1:
                g[slots[k - 1]] += a * du * math.exp(
                    log_heat_step_deriv(full[k] / a) - logdf
                )
            if k <= n - 1:
                g[slots[k]] -= a * du * math.exp(
                    log_heat_step_deriv(full[k + 1] / a) - logdf
                )
        else:
            # d/ds [du s^2/4] = du s / 2 at the surviving finite boundary
            b = _anchor(k, n)
            g[slots[b - 1]] += 0.5 * du * full[b]
    return g


def entropy_hessian(
    problem: RiemannProblem, layout: BoundaryLayout, xi: FreeBoundaries
) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric tridiagonal Hessian as (diagonal, first off-diagonal)."""
    values = _check(layout, xi)
    full = _full_positions(layout, values)
    u = problem.partition.breakpoints
    cs = problem.partition.coefficients
    n = layout.n
    slots = layout.slots
    hd = np.zeros(layout.m)
    ho = np.zeros(max(layout.m - 1, 0))
    for k in range(n + 1):
        du = u[k + 1] - u[k]
        a = cs[k]
        if a > 0.0:
            # With R(t) = H'(t)/dH and H'' = -(t/2) H', the log term of one
            # interval contributes, in the scaled arguments x = xi_{k+1}/a,
            # y = xi_k/a (the a^2 prefactor cancels the chain rule):
            #   d2/d(xi_{k+1})^2 : du * (R(x)^2 + (x/2) R(x))
            #   d2/d(xi_k)^2     : du * (R(y)^2 - (y/2) R(y))
            #   cross            : -du * R(x) R(y)
            logdf = log_heat_step_diff(full[k + 1] / a, full[k] / a)
            if k <= n - 1:
                xs = full[k + 1] / a
                rx = math.exp(log_heat_step_deriv(xs) - logdf)
                hd[slots[k]] += du * (rx * rx + 0.5 * xs * rx)
            if k >= 1:
                ys = full[k] / a
                ry = math.exp(log_heat_step_deriv(ys) - logdf)
                hd[slots[k - 1]] += du * (ry * ry - 0.5 * ys * ry)
            if 1 <= k <= n - 1:
                # endpoints live in adjacent distinct slots by construction
                ho[slots[k - 1]] -= du * rx * ry
        else:
            b = _anchor(k, n)
            hd[slots[b - 1]] += 0.5 * du
    return hd, ho


@dataclass(frozen=True)
class EntropyReport:
    value: float
    gradient: np.ndarray
    hess_diag: np.ndarray
    hess_off: np.ndarray

    def hessian_dense(self) -> np.ndarray:
        m = self.hess_diag.size
        h = np.diag(self.hess_diag)
        for j in range(m - 1):
            h[j, j + 1] = h[j + 1, j] = self.hess_off[j]
        return h


def entropy_report(
    problem: RiemannProblem, layout: BoundaryLayout, xi: FreeBoundaries
) -> EntropyReport:
    hd, ho = entropy_hessian(problem, layout, xi)
    return EntropyReport(
        value=entropy_value(problem, layout, xi),
        gradient=entropy_gradient(problem, layout, xi),
        hess_diag=hd,
        hess_off=ho,
    )


def shift_constant(problem: RiemannProblem) -> float:
    """The data-only constant added by the shifted objective.

    Adding a_k^2 du_k ln(du_k / a_k) per nondegenerate interval keeps the
    objective bounded under partition refinement without moving the argmin.
    """
    u = problem.partition.breakpoints
    cs = problem.partition.coefficients
    total = 0.0
    for k, a in enumerate(cs):
        if a > 0.0:
            du = u[k + 1] - u[k]
            total += a * a * du * math.log(du / a)
    return total


def entropy_shifted(
    problem: RiemannProblem, layout: BoundaryLayout, xi: FreeBoundaries
) -> float:
    return entropy_value(problem, layout, xi) + shift_constant(problem)


@dataclass(frozen=True)
class SublevelBox:
    """Certified bounds on the sublevel set {E <= c}.

    Every feasible point with objective at most c has all boundaries within
    [-radius, radius] and any two distinct free positions at least ``gap``
    apart.  ``delta`` is the underlying lower bound on each log-term argument.
    """

    radius: float
    gap: float
    delta: float


def sublevel_bounds(problem: RiemannProblem, layout: BoundaryLayout, c: float) -> SublevelBox:
    u = problem.partition.breakpoints
    cs = problem.partition.coefficients
    n = layout.n
    if n < 1:
        raise ValueError("sublevel bounds need at least one free boundary")
    weights = []
    for k, a in enumerate(cs):
        du = u[k + 1] - u[k]
        weights.append(a * a * du if a > 0.0 else 0.25 * du)
    m_const = min(weights)
    delta = math.exp(-c / m_const) if c > 0.0 else 1.0
    # every positive term is at most c, so each log argument is at least
    # delta and each quadratic boundary obeys du s^2/4 <= c
    delta_eff = min(max(delta, 1e-320), 0.5)
    du0 = u[1] - u[0]
    dun = u[n + 1] - u[n]
    cpos = max(c, 0.0)
    if cs[0] > 0.0:
        r_left = -cs[0] * heat_step_inverse(delta_eff)
    else:
        r_left = 2.0 * math.sqrt(cpos / du0)
    if cs[-1] > 0.0:
        r_right = -cs[-1] * heat_step_inverse(delta_eff)
    else:
        r_right = 2.0 * math.sqrt(cpos / dun)
    inner_pos = [cs[k] for k in range(1, n) if cs[k] > 0.0]
    gap = delta * min(inner_pos) if inner_pos else 0.0
    return SublevelBox(radius=max(r_left, r_right), gap=gap, delta=delta)
