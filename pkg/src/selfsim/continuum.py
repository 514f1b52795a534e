"""Continuum limit of the boundary objective.

As the state partition is refined, the per-interval objective turns into a
functional of the inverse profile xi(u):

    J(xi) = - int a(u)^2 ln(xi'(u)) du  +  (1/4) int xi(u)^2 du

over the state interval.  This module discretizes a tabulated diffusion
function into admissible partitions, evaluates J and its Euler-Lagrange
residual with convexity-preserving quadrature (composite midpoint values,
forward-difference slopes), minimizes J directly, and runs refinement
studies showing the discrete boundary solves converge to the continuum
minimizer.

Degenerate convention: where a vanishes the slope term is taken as zero
(0 * ln = 0) and the quadratic term survives; a flat run of xi across such a
band is the inverse picture of a jump.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .entropy import entropy_shifted
from .optimizer import SolveOptions, damped_newton, minimize
from .problem import PhasePartition, build_layout, normalize_orientation, require_valid
from .special import heat_step_inverse, log_heat_step_deriv

_JITTER = 1e-12
_GRID_TRIM = 0.05  # study grids keep off the ends, where xi(u) -> -+inf
_GRID_POINTS = 101


@dataclass(frozen=True)
class DiffusionFunction:
    """Tabulated a(u) >= 0 on [states[0], states[-1]], linear between samples."""

    states: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.states) < 2 or len(self.values) != len(self.states):
            raise ValueError("need matching state/value samples, at least two")
        s = np.asarray(self.states, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(v))):
            raise ValueError("samples must be finite")
        if not np.all(np.diff(s) > 0.0):
            raise ValueError("sample states must be strictly increasing")
        if np.any(v < 0.0):
            raise ValueError("diffusion values must be nonnegative")

    @classmethod
    def from_callable(
        cls, fn: Callable[[float], float], lo: float, hi: float, samples: int = 1025
    ) -> "DiffusionFunction":
        s = np.linspace(lo, hi, samples)
        return cls(states=tuple(float(u) for u in s), values=tuple(float(fn(u)) for u in s))

    @property
    def lo(self) -> float:
        return self.states[0]

    @property
    def hi(self) -> float:
        return self.states[-1]

    def __call__(self, u):
        return np.interp(u, self.states, self.values)


@dataclass(frozen=True)
class InverseProfile:
    """xi as a function of the state: nodes (states[i], positions[i]).

    Positions are nondecreasing; a flat run marks a jump of the forward
    profile (the whole state band passes at one location), which is how
    degenerate phases appear in the inverse picture.  Away from those bands
    the positions must be strictly increasing for slopes to make sense.
    """

    states: tuple[float, ...]
    positions: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.states) < 2 or len(self.positions) != len(self.states):
            raise ValueError("need matching state/position nodes, at least two")
        s = np.asarray(self.states, dtype=float)
        p = np.asarray(self.positions, dtype=float)
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(p))):
            raise ValueError("nodes must be finite")
        if not np.all(np.diff(s) > 0.0):
            raise ValueError("states must be strictly increasing")
        if np.any(np.diff(p) < 0.0):
            raise ValueError("positions must be nondecreasing")

    def cells(self) -> int:
        return len(self.states) - 1


def discretize(f: DiffusionFunction, cells: int) -> PhasePartition:
    """Uniform-cell partition with midpoint coefficients.

    Adjacent zero cells merge into one degenerate cell; adjacent equal
    positive coefficients get a relative 1e-12 jitter on the later cell, so
    the output always satisfies the partition rules.  Both adjustments are
    visible in the returned breakpoints/coefficients.
    """
    if cells < 1:
        raise ValueError("need at least one cell")
    edges = np.linspace(f.lo, f.hi, cells + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    raw = [float(f(m)) for m in mids]
    bps: list[float] = [float(edges[0])]
    cs: list[float] = []
    for k, a in enumerate(raw):
        if cs and a == 0.0 and cs[-1] == 0.0:
            bps[-1] = float(edges[k + 1])  # extend the degenerate cell
        else:
            cs.append(a)
            bps.append(float(edges[k + 1]))
    for k in range(1, len(cs)):
        if cs[k] == cs[k - 1]:
            cs[k] = cs[k] * (1.0 + _JITTER)
    partition = PhasePartition(breakpoints=tuple(bps), coefficients=tuple(cs))
    require_valid(partition)
    return partition


def _cell_data(f: DiffusionFunction, profile: InverseProfile):
    w = np.asarray(profile.states, dtype=float)
    xi = np.asarray(profile.positions, dtype=float)
    du = np.diff(w)
    gap = np.diff(xi)
    a = np.asarray(f(0.5 * (w[:-1] + w[1:])), dtype=float)
    if np.any((a > 0.0) & (gap <= 0.0)):
        j = int(np.argmax((a > 0.0) & (gap <= 0.0)))
        raise ValueError(f"profile is flat on a nondegenerate cell (cell {j})")
    return w, xi, du, gap, a


def variational_cost(f: DiffusionFunction, profile: InverseProfile) -> float:
    """J by composite midpoint rule, slopes by forward differences."""
    _, xi, du, gap, a = _cell_data(f, profile)
    mid = 0.5 * (xi[:-1] + xi[1:])
    total = float(np.sum(0.25 * mid * mid * du))
    pos = a > 0.0
    total -= float(np.sum(a[pos] ** 2 * np.log(gap[pos] / du[pos]) * du[pos]))
    return total


def variational_cost_kernel_form(f: DiffusionFunction, profile: InverseProfile) -> float:
    """The same functional before the kernel's square is expanded.

    Per nondegenerate cell: -a^2 ln( H'(xi_mid / a) * slope ) du, with the
    quadratic position term only on degenerate cells.  Differs from
    ``variational_cost`` by exactly ln(2 sqrt(pi)) * sum_{a>0} a^2 du — the
    kernel's normalization prefactor — and nothing else.
    """
    _, xi, du, gap, a = _cell_data(f, profile)
    mid = 0.5 * (xi[:-1] + xi[1:])
    total = 0.0
    for j in range(du.size):
        if a[j] > 0.0:
            log_slope = math.log(gap[j] / du[j])
            total -= a[j] ** 2 * (log_heat_step_deriv(mid[j] / a[j]) + log_slope) * du[j]
        else:
            total += 0.25 * mid[j] * mid[j] * du[j]
    return total


def euler_lagrange_residual(f: DiffusionFunction, profile: InverseProfile) -> np.ndarray:
    """Stationarity defect xi/2 + d/du (a^2 / xi') at the interior nodes.

    The divergence term is the central difference of the per-cell quantity
    a^2/slope across each node.  Endpoints and nodes touching a degenerate
    cell carry NaN: the pointwise equation only holds where a > 0.
    """
    _, xi, du, gap, a = _cell_data(f, profile)
    n = du.size
    res = np.full(n + 1, math.nan)
    s = np.zeros(n)
    pos = a > 0.0
    s[pos] = a[pos] ** 2 * du[pos] / gap[pos]
    for j in range(1, n):
        if a[j - 1] > 0.0 and a[j] > 0.0:
            res[j] = 0.5 * xi[j] + (s[j] - s[j - 1]) / (0.5 * (du[j - 1] + du[j]))
    return res


@dataclass(frozen=True)
class CostMinimum:
    profile: InverseProfile
    cost: float
    grad_norm: float
    iterations: int
    converged: bool


def minimize_variational_cost(
    f: DiffusionFunction, cells: int, options: SolveOptions | None = None
) -> CostMinimum:
    """Newton minimization of J over all node positions on a uniform grid.

    All cells+1 positions are unknowns (no pinned ends: the functional's
    quadratic part keeps them finite).  The Hessian is symmetric tridiagonal
    — cell j couples only nodes j, j+1 — so the boundary-objective Newton
    machinery applies unchanged.
    """
    if cells < 1:
        raise ValueError("need at least one cell")
    w = np.linspace(f.lo, f.hi, cells + 1)
    du = np.diff(w)
    a = np.asarray(f(0.5 * (w[:-1] + w[1:])), dtype=float)
    a_max = float(np.max(a))
    if a_max == 0.0:
        raise ValueError("diffusion vanishes identically")
    pos = a > 0.0

    def feasible(x: np.ndarray) -> bool:
        if not np.all(np.isfinite(x)):
            return False
        gap = np.diff(x)
        return bool(np.all(gap >= 0.0) and np.all(gap[pos] > 0.0))

    def split(x: np.ndarray):
        gap = np.diff(x)
        mid = 0.5 * (x[:-1] + x[1:])
        return gap, mid

    def value_fn(x: np.ndarray) -> float:
        gap, mid = split(x)
        v = float(np.sum(0.25 * mid * mid * du))
        v -= float(np.sum(a[pos] ** 2 * np.log(gap[pos] / du[pos]) * du[pos]))
        return v

    def full_fn(x: np.ndarray):
        gap, mid = split(x)
        s = np.zeros(du.size)
        s[pos] = a[pos] ** 2 * du[pos] / gap[pos]
        quad = 0.25 * mid * du
        g = np.zeros(x.size)
        g[:-1] += s + quad
        g[1:] += -s + quad
        q = np.zeros(du.size)
        q[pos] = a[pos] ** 2 * du[pos] / (gap[pos] * gap[pos])
        r = 0.125 * du
        hd = np.zeros(x.size)
        hd[:-1] += q + r
        hd[1:] += q + r
        ho = -q + r
        return value_fn(x), g, hd, ho

    lo_frac = 0.5 * float(np.min(du)) / (f.hi - f.lo + float(np.min(du)))
    fracs = (w - f.lo + 0.5 * float(np.min(du))) / (f.hi - f.lo + float(np.min(du)))
    start = a_max * np.array([heat_step_inverse(min(max(p, lo_frac), 1.0 - lo_frac)) for p in fracs])
    outcome = damped_newton(start, value_fn, full_fn, feasible, options or SolveOptions())
    return CostMinimum(
        profile=InverseProfile(
            states=tuple(float(u) for u in w),
            positions=tuple(float(v) for v in outcome.x),
        ),
        cost=outcome.value,
        grad_norm=outcome.grad_norm,
        iterations=outcome.iterations,
        converged=outcome.converged,
    )


@dataclass(frozen=True)
class StudyRow:
    cells: int
    partition: PhasePartition
    boundaries: tuple[float, ...]  # solved nominal positions, fused repeated
    inverse: InverseProfile  # boundary polyline read onto the common grid
    shifted_entropy: float
    distance_to_finest: float


def convergence_study(f: DiffusionFunction, cell_counts: Sequence[int]) -> tuple[StudyRow, ...]:
    """Solve the discretized problem at each resolution and compare inverses.

    Each row discretizes, solves the boundary problem, and reads the
    polyline through the solved nodes (u_k, xi_k) onto one fixed state grid
    (trimmed 5% off each end, where the exact inverse diverges).  The last
    row is the reference for the sup-norm distance column; its own entry is
    zero.  Shifted-objective values are reported because they are the ones
    with a refinement limit.
    """
    counts = list(cell_counts)
    if len(counts) < 1 or any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValueError("cell counts must be increasing and nonempty")
    width = f.hi - f.lo
    grid = np.linspace(f.lo + _GRID_TRIM * width, f.hi - _GRID_TRIM * width, _GRID_POINTS)
    partial: list[tuple[int, PhasePartition, tuple[float, ...], np.ndarray, float]] = []
    for cells in counts:
        partition = discretize(f, cells)
        if partition.n < 1:
            raise ValueError(f"{cells} cells leave no free boundary after merging")
        problem = normalize_orientation(f.lo, f.hi, partition)
        layout = build_layout(partition)
        result = minimize(problem, layout)
        if not result.converged:
            raise RuntimeError(f"boundary solve did not converge at {cells} cells")
        nominal = layout.expand(result.minimizer.values)
        on_grid = np.interp(grid, partition.breakpoints[1:-1], nominal)
        shifted = entropy_shifted(problem, layout, result.minimizer)
        partial.append((cells, partition, nominal, on_grid, shifted))
    finest = partial[-1][3]
    rows = []
    for cells, partition, nominal, on_grid, shifted in partial:
        rows.append(
            StudyRow(
                cells=cells,
                partition=partition,
                boundaries=nominal,
                inverse=InverseProfile(
                    states=tuple(float(u) for u in grid),
                    positions=tuple(float(v) for v in on_grid),
                ),
                shifted_entropy=shifted,
                distance_to_finest=float(np.max(np.abs(on_grid - finest))),
            )
        )
    return tuple(rows)
