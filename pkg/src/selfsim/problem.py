"""Problem statement types.

A step-data problem for u_t = (a^2(u) u_x)_x is described by the two constant
states and a phase partition: breakpoints u_0 < ... < u_{n+1} spanning the
state interval and one diffusion coefficient a_k >= 0 per subinterval
(u_k, u_{k+1}).  Adjacent coefficients must differ, any of them may vanish.

The self-similar solution carries one phase boundary per interior breakpoint.
Boundaries enclosing an interior interval with a_k = 0 collapse onto each
other, so the optimization sees fewer free variables than there are nominal
boundaries; BoundaryLayout records that fusing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InvalidPartitionError(ValueError):
    """Raised when a phase partition violates its construction rules."""


class ConstantStatesError(ValueError):
    """Raised when both step states coincide (solution is the constant)."""


@dataclass(frozen=True)
class PhasePartition:
    """Piecewise-constant diffusion: a(u) = coefficients[k] on (breakpoints[k], breakpoints[k+1])."""

    breakpoints: tuple[float, ...]
    coefficients: tuple[float, ...]

    @property
    def n(self) -> int:
        """Number of interior breakpoints (= number of nominal boundaries)."""
        return len(self.breakpoints) - 2

    def state_jumps(self) -> np.ndarray:
        return np.diff(np.asarray(self.breakpoints, dtype=float))


@dataclass(frozen=True)
class Violation:
    message: str
    index: int


def validate(partition: PhasePartition) -> Violation | None:
    """Check a partition against its construction rules.

    Returns None when the partition is admissible and a Violation naming the
    offending entry otherwise.
    """
    bps = partition.breakpoints
    cs = partition.coefficients
    if len(bps) < 2:
        return Violation("need at least two breakpoints", 0)
    if len(cs) != len(bps) - 1:
        return Violation(
            f"expected {len(bps) - 1} coefficients for {len(bps)} breakpoints, got {len(cs)}",
            len(cs),
        )
    for i, b in enumerate(bps):
        if not math.isfinite(b):
            return Violation(f"breakpoint not finite at index {i}", i)
    for i in range(1, len(bps)):
        if not bps[i] > bps[i - 1]:
            return Violation(f"breakpoints not increasing at index {i}", i)
    for k, c in enumerate(cs):
        if not math.isfinite(c) or c < 0.0:
            return Violation(f"negative coefficient at k={k}", k)
    for k in range(1, len(cs)):
        if cs[k] == cs[k - 1]:
            return Violation(f"adjacent equal at k={k - 1}", k - 1)
    if len(cs) > 0 and max(cs) == 0.0 and len(cs) > 1:
        # unreachable given the adjacent-distinct rule, kept as a guard
        return Violation("all coefficients vanish", 0)
    return None


def require_valid(partition: PhasePartition) -> None:
    v = validate(partition)
    if v is not None:
        raise InvalidPartitionError(v.message)


def reversed_partition(partition: PhasePartition) -> PhasePartition:
    """The partition seen after the state reflection u -> -u."""
    return PhasePartition(
        breakpoints=tuple(-b for b in reversed(partition.breakpoints)),
        coefficients=tuple(reversed(partition.coefficients)),
    )


def diffusion_antiderivative(partition: PhasePartition) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and values of A(u) = int_{u_0}^{u} a^2(s) ds.

    A is continuous, piecewise linear, nondecreasing, and constant across
    degenerate intervals; evaluate it with np.interp on the returned pair.
    """
    nodes = np.asarray(partition.breakpoints, dtype=float)
    a2 = np.square(np.asarray(partition.coefficients, dtype=float))
    values = np.concatenate(([0.0], np.cumsum(a2 * np.diff(nodes))))
    return nodes, values


@dataclass(frozen=True)
class RiemannProblem:
    """Step data in the solver frame: u_minus < u_plus.

    ``orientation_flipped`` records that the caller's states arrived in
    decreasing order; the equation is invariant under x -> -x, so downstream
    outputs un-flip by mirroring the profile.
    """

    u_minus: float
    u_plus: float
    partition: PhasePartition
    orientation_flipped: bool = False


def normalize_orientation(
    u_minus: float, u_plus: float, partition: PhasePartition
) -> RiemannProblem:
    """Build a solver-frame problem from caller states in either order."""
    if not (math.isfinite(u_minus) and math.isfinite(u_plus)):
        raise InvalidPartitionError("states must be finite")
    if u_minus == u_plus:
        raise ConstantStatesError(
            "equal states: the solution is the constant; nothing to solve"
        )
    require_valid(partition)
    lo, hi = min(u_minus, u_plus), max(u_minus, u_plus)
    if partition.breakpoints[0] != lo or partition.breakpoints[-1] != hi:
        raise InvalidPartitionError(
            f"partition must span [{lo!r}, {hi!r}], spans "
            f"[{partition.breakpoints[0]!r}, {partition.breakpoints[-1]!r}]"
        )
    return RiemannProblem(
        u_minus=lo,
        u_plus=hi,
        partition=partition,
        orientation_flipped=u_plus < u_minus,
    )


@dataclass(frozen=True)
class BoundaryLayout:
    """Mapping from the n nominal boundaries to the m <= n free variables.

    ``slots[k-1]`` is the free-variable index (0-based) of nominal boundary k.
    The map is nondecreasing and onto; two consecutive boundaries share a slot
    exactly when the interior interval between them carries zero diffusion.
    """

    n: int
    m: int
    slots: tuple[int, ...]
    edge_left_degenerate: bool
    edge_right_degenerate: bool
    inner_degenerate: frozenset[int]

    def expand(self, values: tuple[float, ...]) -> tuple[float, ...]:
        """Nominal boundary positions xi_1..xi_n from the m free values."""
        if len(values) != self.m:
            raise ValueError(f"expected {self.m} free values, got {len(values)}")
        return tuple(values[j] for j in self.slots)

    def contract(self, nominal: tuple[float, ...]) -> tuple[float, ...]:
        """Free values from nominal positions (first entry of each slot)."""
        if len(nominal) != self.n:
            raise ValueError(f"expected {self.n} nominal positions, got {len(nominal)}")
        out: list[float] = []
        seen = -1
        for k, j in enumerate(self.slots):
            if j != seen:
                out.append(nominal[k])
                seen = j
        return tuple(out)


def build_layout(partition: PhasePartition) -> BoundaryLayout:
    require_valid(partition)
    n = partition.n
    cs = partition.coefficients
    slots: list[int] = []
    for k in range(1, n + 1):
        if k == 1:
            slots.append(0)
        elif cs[k - 1] == 0.0:
            # interior interval k-1 is degenerate: boundaries k-1 and k fuse
            slots.append(slots[-1])
        else:
            slots.append(slots[-1] + 1)
    m = (slots[-1] + 1) if slots else 0
    inner = frozenset(k for k in range(1, n) if cs[k] == 0.0)
    return BoundaryLayout(
        n=n,
        m=m,
        slots=tuple(slots),
        edge_left_degenerate=(cs[0] == 0.0),
        edge_right_degenerate=(cs[-1] == 0.0),
        inner_degenerate=inner,
    )
