"""Damped Newton solver: descent, uniqueness, covariance, and the
tridiagonal linear algebra under it."""

from __future__ import annotations

import numpy as np
import pytest

import selfsim as ss
from selfsim.optimizer import (
    SolveOptions,
    TridiagonalFactorizationError,
    solve_spd_tridiagonal,
)

from conftest import dense_hessian, feasible_point, make_problem

TWO_PHASE = ss.PhasePartition((0.0, 1.0, 2.0), (1.0, 2.0))
# frozen regression value from this solver, cross-checked against the
# brute-force grid oracle (agreement to ~7e-6) and finite differences
TWO_PHASE_XI = -0.8694313298425024


def problem_of(part):
    prob = ss.normalize_orientation(part.breakpoints[0], part.breakpoints[-1], part)
    return prob, ss.build_layout(part)


def test_initial_guess_centered_two_phase():
    prob, lay = problem_of(TWO_PHASE)
    assert ss.initial_guess(prob, lay).values == (0.0,)


def test_initial_guess_always_feasible(rng):
    for _ in range(1000):
        phases = int(rng.integers(2, 10))
        prob, lay = make_problem(rng, phases)
        guess = ss.initial_guess(prob, lay)
        assert ss.feasible_values(guess.values)
        assert len(guess.values) == lay.m


def test_two_phase_minimizer_regression():
    prob, lay = problem_of(TWO_PHASE)
    res = ss.minimize(prob, lay)
    assert res.converged
    assert res.minimizer.values[0] == pytest.approx(TWO_PHASE_XI, abs=1e-12)
    assert res.grad_norm <= 1e-12
    assert res.iterations >= 1


def test_trace_descends():
    prob, lay = problem_of(TWO_PHASE)
    res = ss.minimize(prob, lay)
    vals = [r.value for r in res.trace]
    noise = 4.0 * np.finfo(float).eps * (1.0 + abs(vals[-1]))
    for a, b in zip(vals, vals[1:]):
        assert b <= a + noise
    # strict decrease while the gradient is still meaningfully nonzero
    for rec, nxt in zip(res.trace, res.trace[1:]):
        if rec.grad_norm > 1e-8:
            assert nxt.value < rec.value


def test_fast_tail_convergence():
    prob, lay = problem_of(TWO_PHASE)
    res = ss.minimize(prob, lay)
    gnorms = [r.grad_norm for r in res.trace]
    assert any(
        prev > 1e-9 and nxt <= prev / 1e3 for prev, nxt in zip(gnorms, gnorms[1:])
    )


def test_reflection_pair():
    prob, lay = problem_of(TWO_PHASE)
    xi = ss.minimize(prob, lay).minimizer.values
    mirrored = ss.PhasePartition((0.0, 1.0, 2.0), (2.0, 1.0))
    prob_m, lay_m = problem_of(mirrored)
    xi_m = ss.minimize(prob_m, lay_m).minimizer.values
    assert xi_m[0] == pytest.approx(-xi[0], abs=1e-10)


@pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
def test_scale_covariance(lam):
    part = ss.PhasePartition((0.0, 1.0, 2.0, 3.0), (1.0, 0.5, 2.0))
    prob, lay = problem_of(part)
    base = np.asarray(ss.minimize(prob, lay).minimizer.values)
    scaled_part = ss.PhasePartition(part.breakpoints, tuple(lam * a for a in part.coefficients))
    prob_s, lay_s = problem_of(scaled_part)
    scaled = np.asarray(ss.minimize(prob_s, lay_s).minimizer.values)
    assert np.max(np.abs(scaled - lam * base)) <= 1e-8 * max(1.0, lam)


@pytest.mark.parametrize(
    "part",
    [
        ss.PhasePartition((0.0, 1.0, 2.0), (1.0, 2.0)),
        ss.PhasePartition((0.0, 1.0, 2.0, 3.0), (1.0, 0.5, 2.0)),
        ss.PhasePartition((0.0, 1.0, 2.0), (0.0, 1.0)),
        ss.PhasePartition((0.0, 1.0, 2.0, 3.0), (1.0, 0.0, 2.0)),
    ],
)
def test_restarts_agree(part, rng):
    prob, lay = problem_of(part)
    reference = np.asarray(ss.minimize(prob, lay).minimizer.values)
    for _ in range(10):
        start = feasible_point(rng, lay)
        res = ss.minimize(prob, lay, start=start)
        assert res.converged
        assert np.max(np.abs(np.asarray(res.minimizer.values) - reference)) <= 1e-9


def test_degenerate_edge_matches_scalar_bisection():
    part = ss.PhasePartition((0.0, 1.0, 2.0), (0.0, 1.0))
    prob, lay = problem_of(part)
    newton = ss.minimize(prob, lay).minimizer.values[0]
    from selfsim.oracle import stefan_bisection

    assert newton == pytest.approx(stefan_bisection(prob), abs=1e-10)


def test_non_convergence_reported():
    prob, lay = problem_of(TWO_PHASE)
    res = ss.minimize(prob, lay, options=SolveOptions(max_iters=1))
    assert not res.converged
    assert res.iterations == 1
    assert len(res.trace) == 2


def test_options_validated():
    with pytest.raises(ValueError):
        SolveOptions(grad_tol=0.0)
    with pytest.raises(ValueError):
        SolveOptions(max_iters=0)
    with pytest.raises(ValueError):
        SolveOptions(armijo_c=0.5)
    with pytest.raises(ValueError):
        SolveOptions(backtrack_factor=1.0)


def test_explicit_start_is_used():
    prob, lay = problem_of(TWO_PHASE)
    start = ss.FreeBoundaries((-3.0,), lay)
    res = ss.minimize(prob, lay, start=start)
    assert res.trace[0].value == ss.entropy_value(prob, lay, start)
    assert res.converged


def test_tridiagonal_solver_matches_dense(rng):
    for _ in range(50):
        m = int(rng.integers(1, 12))
        off = rng.uniform(-1.0, 1.0, size=max(m - 1, 0))
        # diagonally dominant => SPD
        diag = np.abs(rng.uniform(0.5, 2.0, size=m))
        if m > 1:
            diag[:-1] += np.abs(off)
            diag[1:] += np.abs(off)
        rhs = rng.uniform(-3.0, 3.0, size=m)
        x = solve_spd_tridiagonal(diag, off, rhs)
        assert np.allclose(dense_hessian(diag, off) @ x, rhs, atol=1e-10)


def test_tridiagonal_solver_rejects_indefinite():
    with pytest.raises(TridiagonalFactorizationError):
        solve_spd_tridiagonal(np.array([1.0, -2.0]), np.array([0.0]), np.array([1.0, 1.0]))
    with pytest.raises(TridiagonalFactorizationError):
        # pivot goes nonpositive: [[1, 2], [2, 1]] has eigenvalues 3, -1
        solve_spd_tridiagonal(np.array([1.0, 1.0]), np.array([2.0]), np.array([1.0, 1.0]))


def test_minimize_random_problems_converge(rng):
    for _ in range(40):
        phases = int(rng.integers(2, 8))
        prob, lay = make_problem(rng, phases)
        res = ss.minimize(prob, lay)
        assert res.converged, (prob.partition, res.grad_norm)
        g = ss.entropy_gradient(prob, lay, res.minimizer)
        assert np.max(np.abs(g)) <= 1e-9
