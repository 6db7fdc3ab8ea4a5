from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exact import ExactCycle
from shc import solver
from shc.errors import InvalidInputError, ResonanceError
from shc.model import FixedPointChart, Role
from shc.solver import LoopParams, center_solution_exact, solve_loop


def rel(a, b):
    a, b = float(a), float(b)
    return 0.0 if a == b else abs(a - b) / max(abs(a), abs(b))


def test_c0_reference_point(c0):
    # q1 / (mu^m1 lambda^m2 - 1) with mu = 2, lambda = 1/3, q1 = 1/2 at (10, 4)
    assert center_solution_exact(2, Fraction(1, 3), Fraction(1, 2), (10, 4)) == Fraction(81, 1886)
    sol = solve_loop(c0, (10, 4))
    assert sol.period == 16
    assert sol.Y == pytest.approx(81 / 1886, rel=1e-14)
    assert sol.analytic_realizable
    assert solver.realizability_threshold(c0) == 6.0
    assert sol.product_s == pytest.approx(1024 / 81, rel=1e-14)


@pytest.mark.parametrize("m1, m2", [(1, 1), (3, 7), (10, 4), (9, 4), (25, 13), (40, 30)])
def test_matches_exact_oracle(c0, m1, m2):
    ex = ExactCycle(c0)
    xs, xc, xu = ex.fixed_point([(m1, m2)])
    sol = solve_loop(c0, (m1, m2))
    assert rel(sol.X[0], xs) < 1e-12
    assert rel(sol.q1 + sol.Y, xc) < 1e-12
    assert rel(sol.Z[0], xu) < 1e-12


def test_center_exponent(c0):
    sol = solve_loop(c0, (10, 4))
    expect = (10 * np.log(2) + 4 * np.log(1 / 3)) / 16
    assert sol.center_exponent == pytest.approx(expect, rel=1e-13)
    assert solver.center_lyapunov(c0, (10, 4)) == pytest.approx(expect, rel=1e-13)


def test_params_validation():
    with pytest.raises(InvalidInputError):
        LoopParams(0, 3)
    with pytest.raises(InvalidInputError):
        LoopParams(2.5, 3)
    assert LoopParams(2, 3) < LoopParams(3, 1)
    assert tuple(LoopParams(4, 5)) == (4, 5)


def test_resonance_raises(c0):
    res = c0.replace(p1=FixedPointChart(Role.P1, c0.p1.stable, 4.0, [[5.0]], c0.p1.radii),
                     p2=FixedPointChart(Role.P2, c0.p2.stable, 0.5, c0.p2.unstable, c0.p2.radii))
    with pytest.raises(ResonanceError) as ei:
        solve_loop(res, (1, 2))
    assert ei.value.product == 1.0
    with pytest.raises(ResonanceError):
        center_solution_exact(4, Fraction(1, 2), 1, (1, 2))


@settings(max_examples=60, deadline=None)
@given(m1=st.integers(1, 60), m2=st.integers(1, 60))
def test_center_equation_holds(c0, m1, m2):
    # y = q1 + Y is fixed by y -> s (y - q1), i.e. (s - 1) Y = q1
    sol = solve_loop(c0, (m1, m2))
    assert (sol.product_s - 1.0) * sol.Y == pytest.approx(c0.q1, rel=1e-12)
    y = sol.point[1]
    assert sol.product_s * (y - c0.q1) == pytest.approx(y, rel=1e-9, abs=1e-9 * sol.product_s * c0.q1)


@settings(max_examples=60, deadline=None)
@given(m1=st.integers(1, 60), m2=st.integers(1, 60))
def test_realizability_flag(c0, m1, m2):
    sol = solve_loop(c0, (m1, m2))
    assert sol.analytic_realizable == (sol.product_s > 6.0)
    if sol.analytic_realizable:
        assert abs(sol.Y) < c0.t1.kappa.c


def test_random_cycles_stable_and_unstable(random_cycles):
    # residuals of the block fixed-point equations, computed with plain matrix products
    for c in random_cycles:
        sol = solve_loop(c, (6, 5))
        A1, A2 = c.p1.stable, c.p2.stable
        B1, B2 = c.t1.stable, c.t2.stable
        x = sol.X
        y = B1 @ x + c.q1_prime
        y = np.linalg.matrix_power(A2, 5) @ y
        y = B2 @ y + c.q2_prime
        y = np.linalg.matrix_power(A1, 6) @ y
        assert np.allclose(y, x, rtol=1e-10, atol=1e-14)
        M1, M2 = c.p1.unstable, c.p2.unstable
        N1, N2 = c.t1.unstable, c.t2.unstable
        z = sol.Z
        w = np.linalg.matrix_power(M2, 5) @ (N1 @ z)
        # after T2 the unstable block must land back on z after m1 P1 steps
        assert np.allclose(np.linalg.matrix_power(M1, 6) @ (N2 @ (w - c.q2)), z, rtol=1e-8, atol=1e-12)
