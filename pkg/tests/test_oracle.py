import numpy as np
import pytest

from exact import ExactCycle, brute_force_orbits
from shc import kernels, oracle
from shc.errors import (EnumerationBudgetError, InvalidInputError, LeftLinearizedRegionError,
                        OutsideTransitionRegionError)
from shc.oracle import (Itinerary, fixed_point, local_step, loop_return_map, trace_orbit,
                        transition_step, verify_params)
from shc.solver import solve_loop


def stepwise(cycle, it, p):
    for m1, m2 in it.key():
        p = transition_step(cycle.t1, p)
        for _ in range(m2):
            p = local_step(cycle.p2, p)
        p = transition_step(cycle.t2, p)
        for _ in range(m1):
            p = local_step(cycle.p1, p)
    return p


def test_return_map_matches_steps(c0):
    it = Itinerary.of((10, 4))
    f = loop_return_map(c0, it)
    sol = solve_loop(c0, (10, 4))
    # a point near the periodic one stays in every region for one loop
    p = sol.point + np.array([1e-6, 0.0, 0.0])
    got, want = f.apply(p), stepwise(c0, it, p)
    assert np.allclose(got[:2], want[:2], rtol=1e-12, atol=1e-15)
    # the composed unstable block subtracts two terms of size |b_u|
    assert abs(got[2] - want[2]) <= 8 * np.finfo(float).eps * abs(f.b_u[0])


def test_fixed_point_agrees_with_solver(c0, random_cycles):
    for c in [c0] + random_cycles:
        for m in [(5, 5), (8, 3)]:
            fp = fixed_point(loop_return_map(c, m))
            assert oracle.rel_error(fp, solve_loop(c, m).point) < 1e-9


def test_step_errors(c0):
    with pytest.raises(LeftLinearizedRegionError) as ei:
        local_step(c0.p1, [0.0, 0.9, 0.0])  # image 1.8 leaves the unit polydisc
    assert ei.value.block == "center"
    with pytest.raises(OutsideTransitionRegionError) as ei:
        transition_step(c0.t1, [0.0, 0.3, 0.0])
    assert ei.value.block == "center"


def test_verified_reference(c0):
    sol, rep = verify_params(c0, (10, 4))
    assert rep.empirical_realizable and rep.reason == ""
    assert rep.max_rel_error < 1e-12
    assert rep.trace.final_point.shape == (3,)
    assert len(rep.trace.coords) == 1 + 2 + 10 + 4
    assert rep.trace.steps[-1] == 16


def test_unrealizable_reports_center_failure(c0):
    sol, rep = verify_params(c0, (5, 3))
    assert not sol.analytic_realizable
    assert not rep.empirical_realizable
    assert rep.trace.failure[0] == 0 and rep.trace.failure[2] == "center"
    assert rep.reason.startswith("center region violated at record 0")


def test_perturbed_start_not_periodic(c0):
    sol = solve_loop(c0, (10, 4))
    start = sol.point + np.array([0.0, 0.01, 0.0])
    tr = trace_orbit(c0, (10, 4), start)
    assert tr.all_valid and not tr.closes


def test_forward_and_split_agree_on_short_loops(c0, random_cycles):
    for c in [c0] + random_cycles:
        for m in [(3, 3), (6, 4)]:
            fp = fixed_point(loop_return_map(c, m))
            a = trace_orbit(c, m, fp, scheme="split")
            b = trace_orbit(c, m, fp, scheme="forward")
            n = min(len(a.coords), len(b.coords))
            assert np.allclose(a.coords[:n], b.coords[:n], rtol=1e-7, atol=1e-10)
            assert a.all_valid == b.all_valid


def test_trace_records_match_exact_orbit(c0):
    ex = ExactCycle(c0)
    loops = [(10, 4), (11, 5)]
    p = ex.fixed_point(loops)
    tr = trace_orbit(c0, Itinerary.of(*loops), np.array([float(x) for x in p]))
    exact = ex.orbit(loops, p)
    assert tr.all_valid and tr.closes
    for got, want in zip(tr.coords, exact):
        assert np.allclose(got, [float(x) for x in want], rtol=1e-9, atol=1e-15)


def test_trace_rejects_bad_input(c0):
    with pytest.raises(InvalidInputError):
        trace_orbit(c0, (3, 3), [0.0, 0.5])
    with pytest.raises(InvalidInputError):
        trace_orbit(c0, (3, 3), [0.0, 0.5, 0.0], scheme="sideways")


def test_itinerary_rotation():
    it = Itinerary.of((5, 2), (3, 4))
    assert it.canonical().key() == ((3, 4), (5, 2))
    assert not it.is_canonical()
    assert not Itinerary.of((3, 4), (3, 4)).is_primitive()
    assert Itinerary.of((3, 4), (3, 5)).is_primitive()


def test_realizability_floor(c0):
    m0, failing = oracle.realizability_floor(c0, m_max=30)
    assert m0 == 2
    assert all(m2 == 1 for _, m2 in failing)


@pytest.mark.parametrize("n", [15, 16, 17, 18])
def test_census_matches_brute_force(c0, n):
    got = [p.itinerary.key() for p in oracle.enumerate_periodic_points(c0, n, 2)]
    assert got == brute_force_orbits(ExactCycle(c0), n, 2)


def test_census_single_loop_reference(c0):
    got = [p.itinerary.key() for p in oracle.enumerate_periodic_points(c0, 16, 1)]
    assert got == [((10, 4),), ((11, 3),), ((12, 2),)]


def test_census_threads_deterministic(c0):
    a = oracle.enumerate_periodic_points(c0, 20, 2, workers=1)
    b = oracle.enumerate_periodic_points(c0, 20, 2, workers=3)
    assert [p.itinerary.key() for p in a] == [p.itinerary.key() for p in b]
    assert all(np.array_equal(x.point, y.point) for x, y in zip(a, b))


def test_census_budget(c0, monkeypatch):
    need = oracle.itinerary_count(c0, 30, 3)
    with pytest.raises(EnumerationBudgetError) as ei:
        oracle.enumerate_periodic_points(c0, 30, 3, budget=need - 1)
    assert ei.value.required == need
    monkeypatch.setenv("SHC_BUDGET", "10")
    with pytest.raises(EnumerationBudgetError):
        oracle.enumerate_periodic_points(c0, 30, 3)


def test_count_table(c0):
    t = oracle.count_table(c0, 16, 18, 1)
    assert t.counts[16] == 16 * 3


def test_kernel_region_codes():
    assert kernels.REGION_NAMES[kernels.REGION_K1] == "P1 transition region"
