"""Period exhaustion: loop parameters with consecutive periods and shrinking center exponents.

All pairs kept by the planner satisfy ``L < m2 log(lambda) + m1 log(mu) < L'``
with ``L' - L > 2C``, ``C = max(|log lambda|, |log mu|)``. Stepping ``m1`` or
``m2`` by one moves the log-multiplier by at most ``C``, so one of the two
neighbours always stays inside the window and the period grows by exactly one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, PlanVerificationError, SearchExhaustedError
from .model import SHSimpleCycle
from .oracle import VerificationReport, pack, verify_params
from .solver import LoopParams, PeriodicSolution, log_multiplier, realizability_threshold

DEFAULT_M_FLOOR = 4
DEFAULT_SEARCH_CAP = 400


@dataclass(frozen=True)
class PlannerConfig:
    L: float
    L_prime: float
    C: float
    count: int
    m_floor: int = DEFAULT_M_FLOOR
    search_cap: int = DEFAULT_SEARCH_CAP

    def check(self, cycle: SHSimpleCycle | None = None) -> None:
        if self.count < 1:
            raise InvalidParameterError("count must be >= 1")
        if not self.L_prime - self.L > 2 * self.C:
            raise InvalidParameterError(f"need L' - L > 2C, got {self.L_prime - self.L:.6g} <= {2 * self.C:.6g}")
        if cycle is not None and not self.L > math.log(realizability_threshold(cycle)):
            raise InvalidParameterError("L must exceed log of the realizability threshold")

    def inside(self, value: float) -> bool:
        return self.L < value < self.L_prime

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.L + self.L_prime)


def interval_defaults(cycle: SHSimpleCycle, count: int = 50, *, m_floor: int = DEFAULT_M_FLOOR,
                      search_cap: int = DEFAULT_SEARCH_CAP) -> PlannerConfig:
    C = max(abs(math.log(cycle.lam)), abs(math.log(cycle.mu)))
    L = math.log(realizability_threshold(cycle)) + 0.01
    return PlannerConfig(L=L, L_prime=L + 2 * C + 0.1, C=C, count=count,
                         m_floor=m_floor, search_cap=search_cap)


def initial_pair(cycle: SHSimpleCycle, config: PlannerConfig, *, packed=None) -> LoopParams:
    """Smallest verified pair (by m1 + m2, then m1) inside the window with m1, m2 >= m_floor."""
    packed = pack(cycle) if packed is None else packed
    lo = 2 * config.m_floor
    for total in range(lo, config.search_cap + 1):
        for m1 in range(config.m_floor, total - config.m_floor + 1):
            p = LoopParams(m1, total - m1)
            if not config.inside(log_multiplier(cycle, p)):
                continue
            _, rep = verify_params(cycle, p, packed=packed)
            if rep.empirical_realizable:
                return p
    raise SearchExhaustedError(
        f"no verified pair with m1 + m2 <= {config.search_cap} in ({config.L:.6g}, {config.L_prime:.6g})")


def next_pair(cycle: SHSimpleCycle, config: PlannerConfig, current: LoopParams) -> LoopParams:
    cands = [LoopParams(current.m1 + 1, current.m2), LoopParams(current.m1, current.m2 + 1)]
    ok = [(abs(log_multiplier(cycle, p) - config.midpoint), i, p)
          for i, p in enumerate(cands) if config.inside(log_multiplier(cycle, p))]
    assert ok, f"neither neighbour of {tuple(current)} stays in the window; L' - L > 2C violated"
    return min(ok)[2]


@dataclass(frozen=True)
class PlanStep:
    params: LoopParams
    solution: PeriodicSolution
    verification: VerificationReport

    @property
    def period(self) -> int:
        return self.solution.period

    @property
    def log_multiplier(self) -> float:
        return self.solution.center_exponent * self.solution.period


@dataclass(frozen=True)
class ExhaustionPlan:
    config: PlannerConfig
    steps: tuple[PlanStep, ...]

    @property
    def first_period(self) -> int:
        return self.steps[0].period

    @property
    def periods(self) -> list[int]:
        return [s.period for s in self.steps]

    @property
    def exponents(self) -> list[float]:
        return [s.solution.center_exponent for s in self.steps]


def plan_exhaustion(cycle: SHSimpleCycle, config: PlannerConfig) -> ExhaustionPlan:
    config.check(cycle)
    packed = pack(cycle)
    p = initial_pair(cycle, config, packed=packed)
    steps = []
    for i in range(config.count):
        if i:
            p = next_pair(cycle, config, p)
        sol, rep = verify_params(cycle, p, packed=packed)
        if not rep.empirical_realizable:
            raise PlanVerificationError(f"planned pair {tuple(p)} failed verification: {rep.reason}")
        steps.append(PlanStep(p, sol, rep))
    return ExhaustionPlan(config, tuple(steps))


@dataclass(frozen=True)
class SeparationRow:
    index: int
    params: LoopParams
    min_distance_later: float
    distance_to_segment: float


@dataclass(frozen=True)
class SeparationReport:
    rows: tuple[SeparationRow, ...]
    min_pairwise: float

    @property
    def separated(self) -> bool:
        return self.min_pairwise > 0


def _k1_points(cycle: SHSimpleCycle, step: PlanStep) -> np.ndarray:
    """Orbit points of a planned solution lying in the P1 transition region."""
    tr = step.verification.trace
    ds = cycle.index.d_s
    k = cycle.t1.kappa
    keep = []
    for ch, x in zip(tr.charts, tr.coords):
        if ch != "P1":
            continue
        if (np.linalg.norm(x[:ds]) <= k.s and abs(x[ds] - cycle.q1) <= k.c
                and np.linalg.norm(x[ds + 1:]) <= k.u):
            keep.append(x)
    return np.array(keep).reshape(-1, cycle.index.dim)


def separation_report(cycle: SHSimpleCycle, plan: ExhaustionPlan) -> SeparationReport:
    """Distances between planned periodic points and to the segment they accumulate on.

    The limiting segment is ``{0} x [q1 - kappa_c, q1 + kappa_c] x {0}`` in the P1 chart.
    """
    if len(plan.steps) < 2:
        raise InvalidParameterError("separation needs a plan with at least two steps")
    ds = cycle.index.d_s
    kc = cycle.t1.kappa.c
    pools = [_k1_points(cycle, s) for s in plan.steps]
    rows = []
    for i, st in enumerate(plan.steps):
        x = st.solution.point
        later = [pools[j] for j in range(i + 1, len(plan.steps)) if len(pools[j])]
        if later:
            dist = float(np.min(np.linalg.norm(np.vstack(later) - x, axis=1)))
        else:
            dist = math.inf
        c_off = max(0.0, abs(x[ds] - cycle.q1) - kc)
        seg = float(math.sqrt(np.sum(x[:ds] ** 2) + c_off ** 2 + np.sum(x[ds + 1:] ** 2)))
        rows.append(SeparationRow(i, st.params, dist, seg))
    return SeparationReport(tuple(rows), min(r.min_distance_later for r in rows))
