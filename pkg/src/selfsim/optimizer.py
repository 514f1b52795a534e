"""Damped Newton minimization of the boundary objective.

The Hessian is symmetric tridiagonal and positive definite on the feasible
set, so each Newton direction costs one LDL^T sweep.  Steps are backtracked
both to stay strictly feasible (boundaries strictly increasing) and to
satisfy an Armijo decrease, which makes the iteration globally convergent
from any feasible start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .entropy import (
    FreeBoundaries,
    entropy_gradient,
    entropy_hessian,
    entropy_value,
    feasible_values,
)
from .problem import BoundaryLayout, RiemannProblem
from .special import heat_step_inverse


class TridiagonalFactorizationError(RuntimeError):
    """Raised when a pivot of the LDL^T factorization is not positive."""


def solve_spd_tridiagonal(diag, off, rhs) -> np.ndarray:
    """Solve T x = rhs for symmetric positive definite tridiagonal T.

    ``diag`` holds the main diagonal (length m), ``off`` the first
    off-diagonal (length m-1).  LDL^T without pivoting; raises if a pivot
    fails to be positive, which for our objective can only be a numerical
    accident.
    """
    d = np.asarray(diag, dtype=float).copy()
    e = np.asarray(off, dtype=float)
    x = np.asarray(rhs, dtype=float).copy()
    m = d.size
    l = np.empty(max(m - 1, 0))
    if not np.all(np.isfinite(d)) or (m > 1 and not np.all(np.isfinite(e))):
        raise TridiagonalFactorizationError("non-finite matrix entry")
    if d[0] <= 0.0:
        raise TridiagonalFactorizationError("nonpositive pivot at 0")
    for i in range(1, m):
        l[i - 1] = e[i - 1] / d[i - 1]
        d[i] = d[i] - l[i - 1] * e[i - 1]
        if d[i] <= 0.0 or not math.isfinite(d[i]):
            raise TridiagonalFactorizationError(f"nonpositive pivot at {i}")
    for i in range(1, m):  # forward: L z = rhs
        x[i] -= l[i - 1] * x[i - 1]
    x /= d  # D y = z
    for i in range(m - 2, -1, -1):  # back: L^T x = y
        x[i] -= l[i] * x[i + 1]
    return x


@dataclass(frozen=True)
class SolveOptions:
    grad_tol: float = 1e-12  # threshold = grad_tol * max(1, |grad at start|_inf)
    max_iters: int = 200
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5

    def __post_init__(self) -> None:
        if not self.grad_tol > 0.0:
            raise ValueError("grad_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0.0 < self.armijo_c < 0.5:
            raise ValueError("armijo_c must lie in (0, 0.5)")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise ValueError("backtrack_factor must lie in (0, 1)")


@dataclass(frozen=True)
class IterationRecord:
    value: float
    grad_norm: float
    step_length: float


@dataclass(frozen=True)
class NewtonOutcome:
    x: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool
    records: tuple[IterationRecord, ...]


def _direction(hd, ho, grad) -> np.ndarray:
    try:
        return -solve_spd_tridiagonal(hd, ho, grad)
    except TridiagonalFactorizationError:
        ridge = float(np.max(np.abs(hd))) * 1e-12 + 1e-300
        try:
            return -solve_spd_tridiagonal(hd + ridge, ho, grad)
        except TridiagonalFactorizationError:
            return -np.asarray(grad, dtype=float)


def damped_newton(
    x0: np.ndarray,
    value_fn: Callable[[np.ndarray], float],
    full_fn: Callable[[np.ndarray], tuple[float, np.ndarray, np.ndarray, np.ndarray]],
    feasible: Callable[[np.ndarray], bool],
    options: SolveOptions,
) -> NewtonOutcome:
    x = np.asarray(x0, dtype=float).copy()
    if not feasible(x):
        raise ValueError(f"start point is not feasible: {x!r}")
    value, grad, hd, ho = full_fn(x)
    gnorm = float(np.max(np.abs(grad)))
    tol = options.grad_tol * max(1.0, gnorm)
    records = [IterationRecord(value, gnorm, 0.0)]
    converged = gnorm <= tol
    iterations = 0
    while not converged and iterations < options.max_iters:
        d = _direction(hd, ho, grad)
        slope = float(grad @ d)
        if not slope < 0.0:
            d = -grad
            slope = -float(grad @ grad)
        t = 1.0
        accepted = False
        while t >= 1e-18:
            trial = x + t * d
            if feasible(trial):
                tv = value_fn(trial)
                if tv < value and tv <= value + options.armijo_c * t * slope:
                    accepted = True
                    break
            t *= options.backtrack_factor
        if not accepted:
            # Near the minimum the Newton decrement can fall below the
            # floating-point resolution of the objective, so Armijo cannot
            # certify a strict decrease even though the step is sound.  Accept
            # a feasibility-backtracked step that moves the value by at most
            # rounding noise and at least halves the gradient norm; otherwise
            # we are done moving.
            t = 1.0
            while t >= 1e-18 and not feasible(x + t * d):
                t *= options.backtrack_factor
            if t >= 1e-18:
                trial = x + t * d
                tv = value_fn(trial)
                tval, tgrad, thd, tho = full_fn(trial)
                tgnorm = float(np.max(np.abs(tgrad)))
                noise = 4.0 * np.finfo(float).eps * (1.0 + abs(value))
                if tv <= value + noise and tgnorm <= 0.5 * gnorm:
                    x = trial
                    value, grad, hd, ho = tval, tgrad, thd, tho
                    gnorm = tgnorm
                    records.append(IterationRecord(value, gnorm, t))
                    iterations += 1
                    converged = gnorm <= tol
                    continue
            break  # no representable progress in value or gradient
        x = x + t * d
        value, grad, hd, ho = full_fn(x)
        gnorm = float(np.max(np.abs(grad)))
        records.append(IterationRecord(value, gnorm, t))
        iterations += 1
        converged = gnorm <= tol
    return NewtonOutcome(
        x=x,
        value=value,
        grad_norm=gnorm,
        iterations=iterations,
        converged=converged,
        records=tuple(records),
    )


@dataclass(frozen=True)
class SolveResult:
    minimizer: FreeBoundaries
    entropy: float
    grad_norm: float
    iterations: int
    converged: bool
    trace: tuple[IterationRecord, ...] = field(repr=False)


def initial_guess(problem: RiemannProblem, layout: BoundaryLayout) -> FreeBoundaries:
    """Quantile start: slot j sits where the widest phase's profile would put
    the cumulative state fraction reached at that boundary."""
    if layout.m < 1:
        raise ValueError("problem has no free boundaries (n = 0)")
    u = problem.partition.breakpoints
    cs = problem.partition.coefficients
    span = u[-1] - u[0]
    abar = max(a for a in cs if a > 0.0)
    fracs: dict[int, list[float]] = {}
    for k in range(1, layout.n + 1):
        fracs.setdefault(layout.slots[k - 1], []).append((u[k] - u[0]) / span)
    vals: list[float] = []
    min_gap = 1e-6 * abar
    for j in range(layout.m):
        f = fracs[j]
        guess = abar * heat_step_inverse(sum(f) / len(f))
        if vals and guess < vals[-1] + min_gap:
            guess = vals[-1] + min_gap
        vals.append(guess)
    return FreeBoundaries(values=tuple(vals), layout=layout)


def minimize(
    problem: RiemannProblem,
    layout: BoundaryLayout,
    options: SolveOptions | None = None,
    start: FreeBoundaries | None = None,
) -> SolveResult:
    opts = options or SolveOptions()
    x0 = (start or initial_guess(problem, layout)).as_array()

    def value_fn(x: np.ndarray) -> float:
        return entropy_value(problem, layout, FreeBoundaries(tuple(x), layout))

    def full_fn(x: np.ndarray):
        xi = FreeBoundaries(tuple(x), layout)
        hd, ho = entropy_hessian(problem, layout, xi)
        return entropy_value(problem, layout, xi), entropy_gradient(problem, layout, xi), hd, ho

    outcome = damped_newton(x0, value_fn, full_fn, feasible_values, opts)
    return SolveResult(
        minimizer=FreeBoundaries(tuple(float(v) for v in outcome.x), layout),
        entropy=outcome.value,
        grad_norm=outcome.grad_norm,
        iterations=outcome.iterations,
        converged=outcome.converged,
        trace=outcome.records,
    )
