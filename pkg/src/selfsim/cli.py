"""Command-line surface: parse configs, run workflows, emit CSV artifacts.

Config files are UTF-8 lines of ``key = value`` with ``#`` comments and
bracketed comma-separated lists.  All numeric CSV output uses the shortest
round-trip decimal representation of the double value, so identical inputs
produce byte-identical files.

Exit codes: 0 success; 1 invalid problem or non-convergence; 2 unusable
config or arguments; 3 unexpected internal failure.  Whatever the failure,
already-written output files of the failed run are removed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .api import RiemannSolution, solve_riemann
from .continuum import DiffusionFunction, convergence_study
from .entropy import entropy_value, sublevel_bounds
from .optimizer import SolveOptions, initial_guess
from .oracle import compare_profiles, fd_solve
from .problem import PhasePartition

_COMMANDS = ("solve", "evaluate", "validate", "continuum")
_THREADS_VAR = "SELFSIM_ORACLE_THREADS"
_PROFILE_POINTS = 2001


class ConfigError(ValueError):
    """Unusable configuration text, argument, or environment value."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    out_prefix: str = ""
    u_minus: float | None = None
    u_plus: float | None = None
    interior_breakpoints: tuple[float, ...] | None = None
    coefficients: tuple[float, ...] | None = None
    grad_tol: float = 1e-12
    t_final: float = 1.0
    dx_values: tuple[float, ...] = (0.02, 0.01)
    cell_counts: tuple[int, ...] = (2, 4, 8, 16, 32)
    diffusion_path: str | None = None


_PROBLEM_KEYS = ("u_minus", "u_plus", "breakpoints", "coefficients")
_ALLOWED_KEYS = {
    "solve": _PROBLEM_KEYS + ("grad_tol",),
    "evaluate": _PROBLEM_KEYS + ("grad_tol", "t"),
    "validate": _PROBLEM_KEYS + ("grad_tol", "t", "dx"),
    "continuum": ("diffusion", "cells"),
}
_REQUIRED_KEYS = {
    "solve": _PROBLEM_KEYS,
    "evaluate": _PROBLEM_KEYS,
    "validate": _PROBLEM_KEYS,
    "continuum": ("diffusion",),
}


def _parse_scalar(raw: str, line: int, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"line {line}: key '{key}' expects a number, got '{raw}'") from None


def _parse_list(raw: str, line: int, key: str, cast) -> tuple:
    if not (raw.startswith("[") and raw.endswith("]")):
        raise ConfigError(f"line {line}: key '{key}' expects a bracketed list like [1, 2]")
    body = raw[1:-1].strip()
    if not body:
        return ()
    try:
        return tuple(cast(item.strip()) for item in body.split(","))
    except ValueError:
        raise ConfigError(f"line {line}: key '{key}' has a malformed list entry") from None


def parse_config(text: str, command: str, out_prefix: str = "") -> RunConfig:
    if command not in _COMMANDS:
        raise ConfigError(f"unknown command '{command}'")
    allowed = _ALLOWED_KEYS[command]
    seen: dict[str, object] = {}
    for line_no, full_line in enumerate(text.splitlines(), start=1):
        line = full_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if not eq or not key:
            raise ConfigError(f"line {line_no}: expected 'key = value'")
        if key not in allowed:
            raise ConfigError(f"line {line_no}: unknown key '{key}' for command '{command}'")
        if key in seen:
            raise ConfigError(f"line {line_no}: duplicate key '{key}'")
        if key in ("u_minus", "u_plus", "grad_tol", "t"):
            value: object = _parse_scalar(raw, line_no, key)
            if key in ("grad_tol", "t") and not value > 0.0:
                raise ConfigError(f"line {line_no}: key '{key}' must be positive")
        elif key in ("breakpoints", "coefficients", "dx"):
            value = _parse_list(raw, line_no, key, float)
            if key == "dx" and (not value or any(not d > 0.0 for d in value)):
                raise ConfigError(f"line {line_no}: key 'dx' needs positive entries")
        elif key == "cells":
            value = _parse_list(raw, line_no, key, int)
            if not value or any(c < 1 for c in value) or any(
                b <= a for a, b in zip(value, value[1:])
            ):
                raise ConfigError(
                    f"line {line_no}: key 'cells' needs strictly increasing positive counts"
                )
        else:  # diffusion: a path, kept verbatim
            value = raw
        seen[key] = value
    for key in _REQUIRED_KEYS[command]:
        if key not in seen:
            raise ConfigError(f"missing required key '{key}' for command '{command}'")
    if command != "continuum":
        bps = seen["breakpoints"]
        cs = seen["coefficients"]
        if len(cs) != len(bps) + 1:
            raise ConfigError(
                f"coefficients has {len(cs)} entries but breakpoints has {len(bps)}; "
                f"need len(breakpoints) + 1 = {len(bps) + 1}"
            )
    return RunConfig(
        command=command,
        out_prefix=out_prefix,
        u_minus=seen.get("u_minus"),
        u_plus=seen.get("u_plus"),
        interior_breakpoints=seen.get("breakpoints"),
        coefficients=seen.get("coefficients"),
        grad_tol=seen.get("grad_tol", 1e-12),
        t_final=seen.get("t", 1.0),
        dx_values=seen.get("dx", (0.02, 0.01)),
        cell_counts=seen.get("cells", (2, 4, 8, 16, 32)),
        diffusion_path=seen.get("diffusion"),
    )


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))  # shortest round-trip decimal
    return str(value)


def _write_csv(path: Path, header: tuple[str, ...], rows, written: list[Path]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(path)


def _solve_from_config(config: RunConfig) -> RiemannSolution:
    lo = min(config.u_minus, config.u_plus)
    hi = max(config.u_minus, config.u_plus)
    partition = PhasePartition(
        breakpoints=(lo,) + tuple(config.interior_breakpoints) + (hi,),
        coefficients=tuple(config.coefficients),
    )
    solution = solve_riemann(
        config.u_minus, config.u_plus, partition, SolveOptions(grad_tol=config.grad_tol)
    )
    if not solution.converged:
        raise RuntimeError("boundary solve did not converge")
    return solution


def _plot_halfwidth(solution: RiemannSolution) -> float:
    if solution.layout.m >= 1:
        level = entropy_value(
            solution.problem, solution.layout, initial_guess(solution.problem, solution.layout)
        )
        radius = sublevel_bounds(solution.problem, solution.layout, level).radius
    else:
        radius = max(1.0, 10.0 * max(solution.problem.partition.coefficients))
    return 1.2 * radius


def _cmd_solve(config: RunConfig, out: str, written: list[Path]) -> None:
    solution = _solve_from_config(config)
    _write_csv(
        Path(f"{out}boundaries.csv"),
        ("slot", "xi", "classification", "residual"),
        (
            (rec.slot, rec.location, rec.classification, rec.rh_residual)
            for rec in solution.jumps
        ),
        written,
    )
    halfwidth = _plot_halfwidth(solution)
    grid = np.linspace(-halfwidth, halfwidth, _PROFILE_POINTS)
    values = solution.profile.sample(grid)
    _write_csv(
        Path(f"{out}profile.csv"),
        ("xi", "v"),
        ((float(g), float(v)) for g, v in zip(grid, values)),
        written,
    )
    _write_csv(
        Path(f"{out}trace.csv"),
        ("iteration", "value", "grad_norm", "step_length"),
        (
            (i, rec.value, rec.grad_norm, rec.step_length)
            for i, rec in enumerate(solution.trace)
        ),
        written,
    )


def _cmd_evaluate(config: RunConfig, out: str, written: list[Path]) -> None:
    solution = _solve_from_config(config)
    halfwidth = _plot_halfwidth(solution) * math.sqrt(config.t_final)
    grid = np.linspace(-halfwidth, halfwidth, _PROFILE_POINTS)
    values = solution.profile.sample(grid / math.sqrt(config.t_final))
    _write_csv(
        Path(f"{out}evaluate.csv"),
        ("t", "x", "u"),
        ((config.t_final, float(x), float(v)) for x, v in zip(grid, values)),
        written,
    )


def _oracle_threads() -> int:
    raw = os.environ.get(_THREADS_VAR, "1")
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f"{_THREADS_VAR} must be an integer, got '{raw}'") from None
    if threads < 1:
        raise ConfigError(f"{_THREADS_VAR} must be at least 1, got {threads}")
    return threads


def _cmd_validate(config: RunConfig, out: str, written: list[Path]) -> None:
    solution = _solve_from_config(config)
    # the integrator runs in the solver frame (increasing states)
    profile = (
        solution.profile.mirrored()
        if solution.problem.orientation_flipped
        else solution.profile
    )
    threads = _oracle_threads()
    rows = []
    for dx in config.dx_values:
        fd = fd_solve(solution.problem, config.t_final, dx, threads=threads)
        dist = compare_profiles(fd, profile)
        rows.append((dx, fd.steps, dist.l1, dist.l1_relative, dist.linf_away_from_jumps))
    _write_csv(
        Path(f"{out}validate.csv"),
        ("dx", "steps", "l1", "l1_relative", "linf_away_from_jumps"),
        rows,
        written,
    )


def _read_diffusion_table(path: str) -> DiffusionFunction:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read diffusion table: {exc}") from None
    states: list[float] = []
    values: list[float] = []
    for line_no, full_line in enumerate(text.splitlines(), start=1):
        line = full_line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            u, a = (float(parts[0]), float(parts[1])) if len(parts) == 2 else (None, None)
        except ValueError:
            u = None
        if u is None:
            raise ConfigError(f"{path}:{line_no}: expected 'u, a' with two numbers")
        states.append(u)
        values.append(a)
    try:
        return DiffusionFunction(states=tuple(states), values=tuple(values))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _cmd_continuum(config: RunConfig, out: str, written: list[Path]) -> None:
    f = _read_diffusion_table(config.diffusion_path)
    rows = convergence_study(f, config.cell_counts)
    _write_csv(
        Path(f"{out}continuum.csv"),
        ("cells", "boundaries", "shifted_entropy", "distance_to_finest"),
        (
            (row.cells, len(row.boundaries), row.shifted_entropy, row.distance_to_finest)
            for row in rows
        ),
        written,
    )


def run(config: RunConfig) -> tuple[Path, ...]:
    """Execute one command; returns the written files, or removes them on failure."""
    out = config.out_prefix
    written: list[Path] = []
    dispatch = {
        "solve": _cmd_solve,
        "evaluate": _cmd_evaluate,
        "validate": _cmd_validate,
        "continuum": _cmd_continuum,
    }
    try:
        dispatch[config.command](config, out, written)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return tuple(written)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="selfsim",
        description="Self-similar step-data solver for piecewise-constant diffusion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    help_lines = {
        "solve": "minimize the boundary objective and emit the profile",
        "evaluate": "sample u(t, x) of the solved problem",
        "validate": "cross-check the profile against direct integration",
        "continuum": "refinement study for a tabulated diffusion function",
    }
    for command in _COMMANDS:
        sp = sub.add_parser(command, help=help_lines[command])
        sp.add_argument("--config", required=True, help="path to a key = value config file")
        sp.add_argument("--out", default="", help="output path prefix (default: working directory)")
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text, args.command, out_prefix=args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        written = run(config)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
