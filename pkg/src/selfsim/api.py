"""One-call solve: orient, lay out, minimize, reconstruct, diagnose.

The solver frame always has increasing far-field states; callers with
decreasing states get the space-reflected profile back (the equation is
invariant under x -> -x), with jump diagnostics recomputed in their frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .entropy import FreeBoundaries, shift_constant
from .optimizer import IterationRecord, SolveOptions, minimize
from .problem import (
    BoundaryLayout,
    PhasePartition,
    RiemannProblem,
    build_layout,
    normalize_orientation,
)
from .profile import JumpRecord, SelfSimilarProfile, build_profile, jump_residuals

KIND_SINGLE_ARC = "single-arc"
KIND_FROZEN_STEP = "frozen-step"
KIND_GENERAL = "general"


@dataclass(frozen=True)
class RiemannSolution:
    """Solved step problem in the caller's orientation."""

    problem: RiemannProblem
    layout: BoundaryLayout
    kind: str
    profile: SelfSimilarProfile
    jumps: tuple[JumpRecord, ...]
    entropy: float
    shifted_entropy: float
    grad_norm: float
    iterations: int
    converged: bool
    trace: tuple[IterationRecord, ...] = field(repr=False)

    @property
    def boundaries(self) -> tuple[float, ...]:
        return self.profile.boundaries


def solve_riemann(
    u_minus: float,
    u_plus: float,
    partition: PhasePartition,
    options: SolveOptions | None = None,
) -> RiemannSolution:
    problem = normalize_orientation(u_minus, u_plus, partition)
    layout = build_layout(partition)
    if layout.m == 0:
        # no free boundaries: a single arc, or a step that never moves
        kind = KIND_SINGLE_ARC if partition.coefficients[0] > 0.0 else KIND_FROZEN_STEP
        profile = build_profile(problem, layout, FreeBoundaries(values=(), layout=layout))
        entropy = 0.0
        grad_norm = 0.0
        iterations = 0
        converged = True
        trace: tuple[IterationRecord, ...] = ()
    else:
        kind = KIND_GENERAL
        result = minimize(problem, layout, options)
        profile = build_profile(problem, layout, result.minimizer)
        entropy = result.entropy
        grad_norm = result.grad_norm
        iterations = result.iterations
        converged = result.converged
        trace = result.trace
    if problem.orientation_flipped:
        profile = profile.mirrored()
    return RiemannSolution(
        problem=problem,
        layout=layout,
        kind=kind,
        profile=profile,
        jumps=jump_residuals(problem, profile),
        entropy=entropy,
        shifted_entropy=entropy + shift_constant(problem),
        grad_norm=grad_norm,
        iterations=iterations,
        converged=converged,
        trace=trace,
    )
