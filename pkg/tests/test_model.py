import numpy as np
import pytest

from shc.errors import InvalidInputError, SingularMatrixError
from shc.model import (CycleIndex, FixedPointChart, PolydiscRadii, Role, minexp, opnorm,
                       random_cycle, resonance_check, validate_cycle)


def test_c0_passes(c0):
    rep = validate_cycle(c0)
    assert rep.passed and rep.failures == ()
    assert c0.mu == 2.0 and c0.lam == pytest.approx(1 / 3)
    assert c0.q1 == 0.5 and c0.q2.tolist() == [0.6]
    assert c0.sigma_total == 2


def test_norms():
    A = np.array([[3.0, 0.0], [0.0, 0.5]])
    assert opnorm(A) == pytest.approx(3.0)
    assert minexp(A) == pytest.approx(0.5)
    with pytest.raises(SingularMatrixError):
        minexp(np.zeros((2, 2)))
    with pytest.raises(InvalidInputError):
        opnorm(np.array([[np.nan]]))


def _with_p1(c0, **kw):
    p = c0.p1
    args = dict(role=p.role, stable=p.stable, center=p.center, unstable=p.unstable, radii=p.radii)
    args.update(kw)
    return c0.replace(p1=FixedPointChart(**args))


@pytest.mark.parametrize("kw, axiom", [
    (dict(center=0.9), "P1.center_expanding"),
    (dict(stable=[[1.2]]), "P1.stable_contraction"),
    (dict(unstable=[[1.5]]), "P1.unstable_dominates_center"),
])
def test_p1_axioms(c0, kw, axiom):
    rep = validate_cycle(_with_p1(c0, **kw))
    assert not rep.passed
    assert axiom in rep.axioms()


def test_center_expanding_message(c0):
    rep = validate_cycle(_with_p1(c0, center=0.9))
    f = next(f for f in rep.failures if f.axiom == "P1.center_expanding")
    assert "not > 1" in f.detail and f.value == 0.9


def test_p2_axioms(c0):
    p = c0.p2
    bad = c0.replace(p2=FixedPointChart(Role.P2, p.stable, 1.2, [[0.9]], p.radii))
    ids = validate_cycle(bad).axioms()
    assert "P2.center_contracting" in ids and "P2.unstable_expanding" in ids


def test_transition_axioms(c0):
    from shc.model import TransitionChart
    t = c0.t1
    bad = c0.replace(t1=TransitionChart(t.source, t.sigma, t.stable, [[0.0]], source_anchor=[0.1, 0.5, 0.0],
                                        target_anchor=t.target_anchor, kappa=t.kappa,
                                        center_multiplier=1.0 + 1e-15))
    ids = validate_cycle(bad).axioms()
    assert {"T1.invertible", "T1.source_anchor", "T1.center_multiplier"} <= set(ids)


def test_region_must_fit(c0):
    from shc.model import TransitionChart
    t = c0.t1
    bad = c0.replace(t1=TransitionChart(t.source, t.sigma, t.stable, t.unstable,
                                        source_anchor=t.source_anchor, target_anchor=t.target_anchor,
                                        kappa=PolydiscRadii(0.1, 0.6, 0.1)))
    assert "T1.region_inside_chart" in validate_cycle(bad).axioms()


def test_arrays_frozen(c0):
    with pytest.raises(ValueError):
        c0.p1.stable[0, 0] = 0.0


def test_resonance(c0):
    # 2^a 3^-b is never 1 for a >= 1
    assert resonance_check(c0, 10) == []
    # mu = lambda^-2 exactly resonant at (1, 2)
    p2 = c0.p2
    res = c0.replace(p1=FixedPointChart(Role.P1, c0.p1.stable, 4.0, [[5.0]], c0.p1.radii),
                     p2=FixedPointChart(Role.P2, p2.stable, 0.5, p2.unstable, p2.radii))
    hits = {(w.a, w.b) for w in resonance_check(res, 4)}
    assert (1, 2) in hits and (2, 4) in hits
    assert all(w.a > 0 for w in resonance_check(res, 4))
    assert any("resonance" in w for w in validate_cycle(res).warnings)


def test_random_cycles_valid(rng):
    for _ in range(40):
        c = random_cycle(rng)
        assert validate_cycle(c).passed, validate_cycle(c).axioms()


def test_index_split():
    idx = CycleIndex(2, 3)
    s, c, u = idx.split(np.arange(6.0))
    assert idx.dim == 6 and s.tolist() == [0, 1] and c == 2 and u.tolist() == [3, 4, 5]
