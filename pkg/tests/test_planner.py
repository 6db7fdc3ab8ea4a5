import math

import numpy as np
import pytest

from shc import planner
from shc.errors import InvalidParameterError, SearchExhaustedError
from shc.planner import PlannerConfig, interval_defaults, plan_exhaustion, separation_report
from shc.solver import LoopParams, log_multiplier


@pytest.fixture(scope="module")
def plan20():
    from shc.model import canonical_cycle
    c = canonical_cycle()
    return plan_exhaustion(c, interval_defaults(c, 20))


def test_defaults(c0):
    cfg = interval_defaults(c0)
    assert cfg.C == pytest.approx(math.log(3))
    assert cfg.L == pytest.approx(math.log(6) + 0.01)
    assert cfg.L_prime - cfg.L > 2 * cfg.C
    cfg.check(c0)


def test_check_rejects(c0):
    cfg = interval_defaults(c0)
    with pytest.raises(InvalidParameterError):
        PlannerConfig(cfg.L, cfg.L + cfg.C, cfg.C, 5).check(c0)
    with pytest.raises(InvalidParameterError):
        PlannerConfig(1.0, 1.0 + 3 * cfg.C, cfg.C, 5).check(c0)


def test_plan_consecutive(c0, plan20):
    assert plan20.periods == list(range(plan20.first_period, plan20.first_period + 20))
    assert plan20.steps[0].params == LoopParams(9, 4)
    cfg = plan20.config
    for st in plan20.steps:
        assert st.params.m1 >= 4 and st.params.m2 >= 4
        assert cfg.inside(log_multiplier(c0, st.params))
        assert st.verification.empirical_realizable
    # exponents are log-multiplier over period with bounded numerator
    ex = np.array(plan20.exponents)
    per = np.array(plan20.periods)
    assert np.all(ex * per > cfg.L) and np.all(ex * per < cfg.L_prime)


def test_next_pair_stays_inside(c0):
    cfg = interval_defaults(c0)
    p = LoopParams(9, 4)
    for _ in range(50):
        p = planner.next_pair(c0, cfg, p)
        assert cfg.inside(log_multiplier(c0, p))


def test_search_cap(c0):
    cfg = interval_defaults(c0, 3, search_cap=10)
    with pytest.raises(SearchExhaustedError):
        planner.initial_pair(c0, cfg)


def test_separation(c0, plan20):
    rep = separation_report(c0, plan20)
    assert rep.separated and rep.min_pairwise > 0
    d = [r.distance_to_segment for r in rep.rows]
    assert d[-1] < d[0]
