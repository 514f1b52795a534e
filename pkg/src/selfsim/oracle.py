"""Independent cross-checks for the Newton solve.

Three routes that share nothing with the optimizer beyond the kernel
function itself:

* ``fd_solve`` integrates the parabolic equation directly with an explicit
  conservative scheme on the antiderivative form u_t = A(u)_xx, starting
  from the sharp step; the self-similar profile must emerge on its own.
* ``grid_search_min`` minimizes the boundary objective by exhaustive lattice
  scan plus local refinement, no derivatives involved.
* ``stefan_bisection`` solves single-boundary degenerate-edge problems from
  the interface balance law alone, written out by hand, via bisection on a
  monotone residual.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .entropy import FreeBoundaries, entropy_value, sublevel_bounds
from .optimizer import initial_guess
from .problem import BoundaryLayout, RiemannProblem, diffusion_antiderivative
from .profile import SelfSimilarProfile
from .special import log_heat_step_deriv, log_heat_step_diff

_INF = math.inf


@dataclass(frozen=True)
class FDGrid:
    """State of the explicit integrator at the final time.

    Cell i sits at x_i = -half_width + i*dx; the initial jump fell between
    the two middle cells, half a cell off the origin on each side, so the
    diffusivity is never evaluated exactly at a breakpoint state.
    """

    half_width: float
    dx: float
    dt: float
    t_final: float
    cells: np.ndarray
    steps: int

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.cells.size) * self.dx - self.half_width


def fd_solve(
    problem: RiemannProblem,
    t_final: float,
    dx: float,
    *,
    halfwidth_factor: float = 10.0,
    safety: float = 0.9,
    threads: int = 1,
) -> FDGrid:
    """Integrate u_t = A(u)_xx from step data up to t_final.

    Second differences of the piecewise-linear antiderivative A need no
    face-averaged coefficients and stay well defined where the diffusivity
    jumps or vanishes.  Ends are pinned to the far-field states; the domain
    half-width of at least ``halfwidth_factor * a_max * sqrt(t_final)`` puts
    the boundary error far below the scheme's own truncation error.  The
    time step is ``safety`` times the explicit stability bound
    dx^2 / (2 max A'), which also makes the update monotone (order
    preserving), so comparison arguments apply to the discrete solution.

    ``threads`` > 1 splits the A(u) table lookups across a thread pool in
    fixed disjoint slices; each entry is a pure function of the previous
    time level, so the result is bit-identical to the sequential run.
    """
    if not (t_final > 0.0 and dx > 0.0):
        raise ValueError("t_final and dx must be positive")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    nodes, avals = diffusion_antiderivative(problem.partition)
    a_max = max(problem.partition.coefficients)
    half_cells = int(math.ceil(halfwidth_factor * max(a_max, 1.0) * math.sqrt(t_final) / dx)) + 1
    x = (np.arange(2 * half_cells) - half_cells + 0.5) * dx
    u = np.where(x < 0.0, problem.u_minus, problem.u_plus).astype(float)
    half_width = (half_cells - 0.5) * dx
    if a_max == 0.0:
        return FDGrid(half_width=half_width, dx=dx, dt=0.0, t_final=t_final, cells=u, steps=0)
    dt_bound = safety * dx * dx / (2.0 * a_max * a_max)
    steps = int(math.ceil(t_final / dt_bound))
    dt = t_final / steps
    lam = dt / (dx * dx)
    if threads == 1 or u.size < 4 * threads:
        for _ in range(steps):
            av = np.interp(u, nodes, avals)
            u[1:-1] += lam * (av[2:] - 2.0 * av[1:-1] + av[:-2])
    else:
        av = np.empty_like(u)
        slices = [
            slice(b, e)
            for b, e in itertools.pairwise(np.linspace(0, u.size, threads + 1).astype(int))
        ]

        def lookup(s: slice) -> None:
            av[s] = np.interp(u[s], nodes, avals)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for _ in range(steps):
                list(pool.map(lookup, slices))
                u[1:-1] += lam * (av[2:] - 2.0 * av[1:-1] + av[:-2])
    return FDGrid(half_width=half_width, dx=dx, dt=dt, t_final=t_final, cells=u, steps=steps)


@dataclass(frozen=True)
class ProfileDistance:
    l1: float
    l1_relative: float  # l1 over the mass the profile moved from the step
    linf_away_from_jumps: float


def compare_profiles(
    fd: FDGrid, profile: SelfSimilarProfile, collar: float | None = None
) -> ProfileDistance:
    """Distances between a direct integration and the assembled profile.

    L1 by the trapezoid rule on the grid; the sup-norm column excludes cells
    within ``collar`` (default: one cell) of each discontinuity, where any
    fixed grid pays an O(1) penalty for resolving a genuine jump.
    """
    scale = math.sqrt(fd.t_final)
    x = fd.positions
    exact = profile.sample(x / scale)
    diff = np.abs(fd.cells - exact)
    l1 = float(np.trapezoid(diff, dx=fd.dx))
    step0 = np.where(x < 0.0, profile.left_state, profile.right_state)
    mass = float(np.trapezoid(np.abs(exact - step0), dx=fd.dx))
    keep = np.ones(diff.shape, dtype=bool)
    width = fd.dx if collar is None else collar
    for jump in profile.jumps():
        keep &= np.abs(x - jump.location * scale) > width
    linf = float(np.max(diff[keep])) if np.any(keep) else 0.0
    return ProfileDistance(
        l1=l1,
        l1_relative=l1 / mass if mass > 0.0 else math.inf,
        linf_away_from_jumps=linf,
    )


@dataclass(frozen=True)
class GridSearchResult:
    minimizer: FreeBoundaries
    value: float
    round_values: tuple[float, ...]  # best objective after each round


def grid_search_min(
    problem: RiemannProblem,
    layout: BoundaryLayout,
    box_radius: float | None = None,
    coarse_step: float | None = None,
    *,
    refine_rounds: int = 3,
    refine_factor: int = 10,
) -> GridSearchResult:
    """Derivative-free minimizer: scan a certified lattice, then refine.

    The first round enumerates every increasing tuple of lattice points
    h*Z within the box (default: the sublevel box of the starting guess,
    which the true minimizer cannot leave).  Each refinement round re-grids
    the incumbent's neighborhood with a ``refine_factor`` finer step; the
    incumbent is always a candidate, so round bests never increase.
    Intended as an oracle for m <= 3; the cost is exponential in m.
    """
    m = layout.m
    if m < 1:
        raise ValueError("problem has no free boundaries (n = 0)")
    if m > 3:
        raise ValueError(f"lattice search is limited to m <= 3, got m={m}")

    def ev(vals: tuple[float, ...]) -> float:
        return entropy_value(problem, layout, FreeBoundaries(vals, layout))

    start = initial_guess(problem, layout)
    best_x = tuple(float(v) for v in start.values)
    best_v = ev(best_x)
    radius = box_radius if box_radius is not None else max(
        sublevel_bounds(problem, layout, best_v).radius, 1e-6
    )
    step = coarse_step if coarse_step is not None else radius / 100.0
    if not (radius > 0.0 and step > 0.0):
        raise ValueError("box radius and step must be positive")
    k = int(math.ceil(radius / step))
    axis = step * np.arange(-k, k + 1)
    for combo in itertools.combinations(axis, m):
        v = ev(tuple(float(c) for c in combo))
        if v < best_v:
            best_v, best_x = v, tuple(float(c) for c in combo)
    round_values = [best_v]
    for _ in range(refine_rounds):
        fine = step / refine_factor
        offsets = fine * np.arange(-refine_factor, refine_factor + 1)
        axes = [b + offsets for b in best_x]
        for combo in itertools.product(*axes):
            if any(combo[j + 1] <= combo[j] for j in range(m - 1)):
                continue
            v = ev(tuple(float(c) for c in combo))
            if v < best_v:
                best_v, best_x = v, tuple(float(c) for c in combo)
        round_values.append(best_v)
        step = fine
    return GridSearchResult(
        minimizer=FreeBoundaries(values=best_x, layout=layout),
        value=best_v,
        round_values=tuple(round_values),
    )


def _interface_residual(problem: RiemannProblem, xi: float) -> float:
    # Hand-coded balance at the single boundary of an n = 1 problem:
    # (right - left) * xi / 2 + flux from the right - flux from the left,
    # each flux written directly from the arc shape on its side.  Strictly
    # increasing in xi, -inf to +inf, so bisection cannot miss the root.
    u0, u1, u2 = problem.partition.breakpoints
    a0, a1 = problem.partition.coefficients
    if a0 > 0.0:
        s = xi / a0
        flux_left = a0 * (u1 - u0) * math.exp(
            log_heat_step_deriv(s) - log_heat_step_diff(s, -_INF)
        )
        left = u1
    else:
        flux_left = 0.0
        left = u0
    if a1 > 0.0:
        s = xi / a1
        flux_right = a1 * (u2 - u1) * math.exp(
            log_heat_step_deriv(s) - log_heat_step_diff(_INF, s)
        )
        right = u1
    else:
        flux_right = 0.0
        right = u2
    return 0.5 * (right - left) * xi + flux_right - flux_left


def stefan_bisection(problem: RiemannProblem, *, tol: float = 1e-13) -> float:
    """Boundary position of a degenerate-edge n = 1 problem by bisection.

    Exactly one of the two phases must carry zero diffusion, so the single
    boundary obeys a scalar flux balance: the constant side contributes the
    moving-interface term, the diffusive side the one-sided flux.
    """
    if problem.partition.n != 1:
        raise ValueError(
            f"bisection oracle handles exactly one boundary, got n={problem.partition.n}"
        )
    a0, a1 = problem.partition.coefficients
    if (a0 == 0.0) == (a1 == 0.0):
        raise ValueError("bisection oracle needs exactly one degenerate edge phase")
    w = 2.0 * max(max(a0, a1), 1.0)
    lo, hi = -w, w
    for _ in range(200):
        if _interface_residual(problem, lo) < 0.0 < _interface_residual(problem, hi):
            break
        lo, hi = 2.0 * lo, 2.0 * hi
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if _interface_residual(problem, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
