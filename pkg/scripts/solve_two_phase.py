"""Solve one step problem and print the boundary layout it produces.

Usage:
    python scripts/solve_two_phase.py
    python scripts/solve_two_phase.py --breakpoints 0,1,2,3 --coefficients 1,0,2
"""

import argparse

from selfsim import PhasePartition, solve_riemann


def parse_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(v) for v in raw.split(","))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--breakpoints", type=parse_floats, default=(0.0, 1.0, 2.0))
    parser.add_argument("--coefficients", type=parse_floats, default=(1.0, 2.0))
    args = parser.parse_args()

    partition = PhasePartition(breakpoints=args.breakpoints, coefficients=args.coefficients)
    sol = solve_riemann(args.breakpoints[0], args.breakpoints[-1], partition)

    print(f"kind:        {sol.kind}")
    print(f"objective:   {sol.entropy:.15g}")
    print(f"iterations:  {sol.iterations}  (grad norm {sol.grad_norm:.3e})")
    print(f"converged:   {sol.converged}")
    if not sol.jumps:
        print("no free boundaries (single arc or frozen step)")
    for rec in sol.jumps:
        print(
            f"boundary {rec.boundary}: xi = {rec.location:+.12f}  {rec.classification:6s}"
            f"  states {rec.left:g} -> {rec.right:g}  residual {rec.rh_residual:+.2e}"
        )
    print("\ndescent trace (first/last rows):")
    rows = list(enumerate(sol.trace))
    for i, rec in rows[:2] + rows[-2:]:
        print(f"  it {i:3d}  value {rec.value:+.12e}  |grad| {rec.grad_norm:.3e}")


if __name__ == "__main__":
    main()
