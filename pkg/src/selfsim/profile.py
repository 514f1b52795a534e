"""Piecewise self-similar profiles and their jump diagnostics.

A solved problem yields v(xi), xi = x / sqrt(t), as an ordered tiling of the
line by error-function arcs and constant segments, with zero-width jump
markers where the state is discontinuous (only degenerate intervals produce
those).  Arcs are stored as v(xi) = u_ref + slope * (H(xi/a) - f_ref) with
H = heat_step, which covers increasing and mirrored (decreasing) profiles in
one form and evaluates exactly to the breakpoint state at the anchored end.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .entropy import FreeBoundaries
from .problem import BoundaryLayout, RiemannProblem, diffusion_antiderivative
from .special import heat_step, heat_step_deriv, heat_step_vec

_INF = math.inf


@dataclass(frozen=True)
class ArcPiece:
    lo: float
    hi: float
    coefficient: float
    u_ref: float  # state at the left endpoint
    f_ref: float  # heat_step(lo / coefficient)
    slope: float  # state change per unit of heat_step

    def value_at(self, xi: float) -> float:
        return self.u_ref + self.slope * (heat_step(xi / self.coefficient) - self.f_ref)

    def value_vec(self, xi: np.ndarray) -> np.ndarray:
        return self.u_ref + self.slope * (heat_step_vec(xi / self.coefficient) - self.f_ref)

    def flux_at(self, xi: float) -> float:
        # a^2 dv/dxi = a * slope * H'(xi / a)
        if math.isinf(xi):
            return 0.0
        return self.coefficient * self.slope * heat_step_deriv(xi / self.coefficient)


@dataclass(frozen=True)
class ConstantPiece:
    lo: float
    hi: float
    value: float

    def value_at(self, xi: float) -> float:
        return self.value

    def value_vec(self, xi: np.ndarray) -> np.ndarray:
        return np.full(np.shape(xi), self.value)

    def flux_at(self, xi: float) -> float:
        return 0.0


@dataclass(frozen=True)
class JumpPoint:
    location: float
    left: float
    right: float


Piece = ArcPiece | ConstantPiece | JumpPoint


@dataclass(frozen=True)
class SelfSimilarProfile:
    """Ordered pieces tiling (-inf, inf); segments are half-open [lo, hi)."""

    pieces: tuple[Piece, ...]
    boundaries: tuple[float, ...]  # nominal positions, fused pairs repeated

    def segments(self) -> tuple[Piece, ...]:
        return tuple(p for p in self.pieces if not isinstance(p, JumpPoint))

    def jumps(self) -> tuple[JumpPoint, ...]:
        return tuple(p for p in self.pieces if isinstance(p, JumpPoint))

    def _segment_index(self, segs, xi: float) -> int:
        los = [s.lo for s in segs]
        return max(bisect_right(los, xi) - 1, 0)

    def limits(self, xi: float) -> tuple[float, float]:
        """One-sided values (left limit, right limit) at xi.

        At discontinuities the exact one-sided states come from the jump
        marker; everywhere else the value is continuous, so the two limits
        coincide (arc evaluation from the neighbour piece may be a rounding
        error off the shared state, which must not read as a jump).
        """
        for p in self.pieces:
            if isinstance(p, JumpPoint) and p.location == xi:
                return p.left, p.right
        segs = self.segments()
        i = self._segment_index(segs, xi)
        v = segs[i].value_at(xi)
        return v, v

    def flux_limits(self, xi: float) -> tuple[float, float]:
        """One-sided values of a^2(v) v'(xi)."""
        segs = self.segments()
        i = self._segment_index(segs, xi)
        right = segs[i].flux_at(xi)
        if i > 0 and segs[i].lo == xi:
            return segs[i - 1].flux_at(xi), right
        return right, right

    def sample(self, xs) -> np.ndarray:
        """Values on a grid; exact junction points take the right limit."""
        xs = np.asarray(xs, dtype=float)
        out = np.empty(xs.shape)
        segs = self.segments()
        los = np.array([s.lo for s in segs])
        idx = np.clip(np.searchsorted(los, xs, side="right") - 1, 0, len(segs) - 1)
        for i, seg in enumerate(segs):
            mask = idx == i
            if np.any(mask):
                out[mask] = seg.value_vec(xs[mask])
        return out

    @property
    def left_state(self) -> float:
        return self.segments()[0].value_at(-_INF)

    @property
    def right_state(self) -> float:
        return self.segments()[-1].value_at(_INF)

    def mirrored(self) -> "SelfSimilarProfile":
        """The profile of the space-reflected solution, v(-xi)."""
        new_pieces: list[Piece] = []
        for p in reversed(self.pieces):
            if isinstance(p, ArcPiece):
                new_pieces.append(
                    ArcPiece(
                        lo=-p.hi,
                        hi=-p.lo,
                        coefficient=p.coefficient,
                        u_ref=p.value_at(p.hi),
                        f_ref=heat_step(-p.hi / p.coefficient),
                        slope=-p.slope,
                    )
                )
            elif isinstance(p, ConstantPiece):
                new_pieces.append(ConstantPiece(lo=-p.hi, hi=-p.lo, value=p.value))
            else:
                new_pieces.append(JumpPoint(location=-p.location, left=p.right, right=p.left))
        bounds = tuple(-b for b in reversed(self.boundaries))
        return SelfSimilarProfile(pieces=tuple(new_pieces), boundaries=bounds)


def build_profile(
    problem: RiemannProblem, layout: BoundaryLayout, minimizer: FreeBoundaries
) -> SelfSimilarProfile:
    """Assemble the piecewise profile from solved boundary positions."""
    u = problem.partition.breakpoints
    cs = problem.partition.coefficients
    n = layout.n
    if n == 0:
        a = cs[0]
        if a > 0.0:
            seg = ArcPiece(
                lo=-_INF, hi=_INF, coefficient=a, u_ref=u[0], f_ref=0.0, slope=u[1] - u[0]
            )
            return SelfSimilarProfile(pieces=(seg,), boundaries=())
        # zero diffusion everywhere: the step never moves
        return SelfSimilarProfile(
            pieces=(
                ConstantPiece(-_INF, 0.0, u[0]),
                JumpPoint(0.0, u[0], u[1]),
                ConstantPiece(0.0, _INF, u[1]),
            ),
            boundaries=(),
        )
    nominal = layout.expand(minimizer.values)
    full = (-_INF,) + nominal + (_INF,)
    segments: list[Piece] = []
    jumps: dict[float, JumpPoint] = {}
    for k in range(n + 1):
        lo, hi = full[k], full[k + 1]
        a = cs[k]
        if a > 0.0:
            f_lo = heat_step(lo / a)
            f_hi = heat_step(hi / a)
            segments.append(
                ArcPiece(
                    lo=lo,
                    hi=hi,
                    coefficient=a,
                    u_ref=u[k],
                    f_ref=f_lo,
                    slope=(u[k + 1] - u[k]) / (f_hi - f_lo),
                )
            )
        elif k == 0:
            segments.append(ConstantPiece(-_INF, hi, u[0]))
            jumps[hi] = JumpPoint(hi, u[0], u[1])
        elif k == n:
            segments.append(ConstantPiece(lo, _INF, u[n + 1]))
            jumps[lo] = JumpPoint(lo, u[n], u[n + 1])
        else:
            jumps[lo] = JumpPoint(lo, u[k], u[k + 1])  # fused pair, zero width
    pieces: list[Piece] = []
    for seg in segments:
        if seg.lo in jumps:
            pieces.append(jumps.pop(seg.lo))
        pieces.append(seg)
    return SelfSimilarProfile(pieces=tuple(pieces), boundaries=nominal)


def eval_selfsimilar(profile: SelfSimilarProfile, xi: float):
    """v(xi); at a jump location, the pair of one-sided values."""
    left, right = profile.limits(xi)
    if left != right:
        return (left, right)
    return right


def eval_solution(profile: SelfSimilarProfile, t: float, x: float):
    """u(t, x) = v(x / sqrt(t)) for t > 0."""
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t!r}")
    return eval_selfsimilar(profile, x / math.sqrt(t))


def flux(profile: SelfSimilarProfile, xi: float):
    """a^2(v) v'(xi); at a junction, the pair of one-sided fluxes."""
    left, right = profile.flux_limits(xi)
    if left != right:
        return (left, right)
    return right


@dataclass(frozen=True)
class JumpRecord:
    boundary: int  # nominal index, 1-based
    slot: int  # free-variable index, 0-based
    location: float
    left: float
    right: float
    a_jump: float  # jump of A(u) across the line (zero for weak solutions)
    rh_residual: float  # [u] * xi / 2 + [a^2 v']
    classification: str  # "weak" | "strong"


def jump_residuals(problem: RiemannProblem, profile: SelfSimilarProfile) -> tuple[JumpRecord, ...]:
    """Interface diagnostics at every nominal boundary.

    The residual is the self-similar form of the moving-interface balance:
    (right - left) * xi / 2 plus the jump of the diffusive flux.  It vanishes
    at the minimizer and is reported, not thrown, so perturbed profiles can
    be inspected.
    """
    nodes, avals = diffusion_antiderivative(problem.partition)
    records: list[JumpRecord] = []
    slot = -1
    prev_loc = None
    for i, loc in enumerate(profile.boundaries):
        if prev_loc is None or loc != prev_loc:
            slot += 1
            prev_loc = loc
        left, right = profile.limits(loc)
        flux_left, flux_right = profile.flux_limits(loc)
        a_jump = float(np.interp(right, nodes, avals) - np.interp(left, nodes, avals))
        residual = (right - left) * loc / 2.0 + (flux_right - flux_left)
        records.append(
            JumpRecord(
                boundary=i + 1,
                slot=slot,
                location=loc,
                left=left,
                right=right,
                a_jump=a_jump,
                rh_residual=residual,
                classification="strong" if left != right else "weak",
            )
        )
    return tuple(records)
