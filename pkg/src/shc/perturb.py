"""Center-direction perturbation cascade along planned periodic orbits.

Two stages act on each planned orbit: a cocycle correction that flattens the
center multiplier to 1 within a C1 budget, then a bump-windowed oscillation
on the center return map that creates many fixed points while keeping its C1
size under the same budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from . import kernels
from .errors import (BudgetExceededError, InvalidInputError, InvalidParameterError,
                     InvalidResolutionError)
from .growth import GrowthTable, RateReport, growth_report  # noqa: F401
from .model import SHSimpleCycle
from .planner import ExhaustionPlan

# max |beta'| for beta(u) = 16 u^2 (1 - u)^2, attained at u = (3 - sqrt 3) / 6
_BETA_PRIME_MAX = 32.0 * math.sqrt(3.0) / 18.0


@dataclass(frozen=True)
class CenterCocycle:
    """Center multipliers along one period, starting where the orbit enters the P1 chart."""

    multipliers: np.ndarray

    @property
    def period(self) -> int:
        return len(self.multipliers)

    @property
    def product(self) -> float:
        return float(np.prod(self.multipliers))

    @property
    def exponent(self) -> float:
        return float(np.sum(np.log(self.multipliers))) / self.period


def orbit_center_cocycle(cycle: SHSimpleCycle, sol) -> CenterCocycle:
    m1, m2 = sol.params
    mult = np.concatenate([np.full(m1, cycle.mu), np.ones(cycle.t1.sigma),
                           np.full(m2, cycle.lam), np.ones(cycle.t2.sigma)])
    mult.setflags(write=False)
    return CenterCocycle(mult)


@dataclass(frozen=True)
class CocycleAdjustment:
    factors: np.ndarray
    epsilon_used: float

    def apply(self, cocycle: CenterCocycle) -> CenterCocycle:
        return CenterCocycle(cocycle.multipliers * self.factors)


def required_budget(cocycle: CenterCocycle) -> float:
    return abs(math.exp(-cocycle.exponent) - 1.0)


def zero_center_exponent(cocycle: CenterCocycle, epsilon: float) -> CocycleAdjustment:
    """Uniform per-step factor ``c = product^(-1/period)`` bringing the exponent to zero."""
    if not epsilon > 0:
        raise InvalidParameterError("epsilon must be positive")
    c = math.exp(-cocycle.exponent)
    need = abs(c - 1.0)
    if need > epsilon:
        raise BudgetExceededError(f"zeroing the center exponent needs epsilon >= {need:.6g}",
                                  required=need, epsilon=epsilon)
    factors = np.full(cocycle.period, c)
    factors.setflags(write=False)
    return CocycleAdjustment(factors, need)


@dataclass(frozen=True)
class CenterBumpPerturbation:
    """``h(y) = a * beta(u) * sin(pi K u)`` on ``[lo, hi]``, ``u = (y - lo) / (hi - lo)``."""

    support: tuple[float, float]
    amplitude: float
    frequency: int
    epsilon: float

    @property
    def width(self) -> float:
        return self.support[1] - self.support[0]

    def __call__(self, y):
        return kernels.bump_values(y, self.support[0], self.width, self.amplitude, float(self.frequency))

    def derivative(self, y):
        return kernels.bump_derivative(y, self.support[0], self.width, self.amplitude,
                                       float(self.frequency))

    def derivative_bound(self) -> float:
        """Analytic bound on sup |h'|."""
        return self.amplitude / self.width * (_BETA_PRIME_MAX + math.pi * self.frequency)

    @property
    def interior_zeros(self) -> int:
        return self.frequency - 1


def spawn_center_fixed_points(support_width: float, N: int, epsilon: float,
                              center: float = 0.0) -> CenterBumpPerturbation:
    """Bump with at least ``N`` sign-changing zeros and C1 size at most ``epsilon``.

    Each zero is a fixed point of ``y -> y + h(y)``; the amplitude shrinks like
    ``1/N`` so the derivative bound holds for every ``N``.
    """
    if not support_width > 0:
        raise InvalidParameterError("support width must be positive")
    if int(N) != N or N < 1:
        raise InvalidParameterError("N must be a positive integer")
    if not epsilon > 0:
        raise InvalidParameterError("epsilon must be positive")
    K = int(N) + 2
    a = epsilon * support_width / (_BETA_PRIME_MAX + math.pi * K)
    lo = center - support_width / 2
    return CenterBumpPerturbation((lo, lo + support_width), a, K, epsilon)


def count_fixed_points(p: CenterBumpPerturbation, resolution: float, *, kernel=None) -> int:
    """Sign changes of ``h`` on a grid of spacing ``resolution``; a lower bound on its zeros."""
    if not resolution > 0 or not resolution < p.width / (4 * p.frequency):
        raise InvalidResolutionError(
            f"resolution {resolution!r} must be below width/(4 K) = {p.width / (4 * p.frequency):.3g}")
    kernel = kernels.bump_scan if kernel is None else kernel
    changes, _ = kernel(p.support[0], p.width, p.amplitude, float(p.frequency), resolution)
    return int(changes)


def sampled_derivative_max(p: CenterBumpPerturbation, resolution: float, *, kernel=None) -> float:
    kernel = kernels.bump_scan if kernel is None else kernel
    _, d = kernel(p.support[0], p.width, p.amplitude, float(p.frequency), resolution)
    return float(d)


# --------------------------------------------------------------------------
# cascade

def _factorial(n: int) -> int:
    return math.factorial(n)


def _n_two_n(n: int) -> int:
    return n * 2 ** n


A_SEQUENCES: dict[str, Callable[[int], int]] = {
    "factorial": _factorial,
    "n2n": _n_two_n,
    "zero": lambda n: 0,
}


def resolve_sequence(a_seq) -> Callable[[int], int]:
    """Name from :data:`A_SEQUENCES`, a mapping ``n -> a_n`` or a callable."""
    if callable(a_seq):
        return a_seq
    if isinstance(a_seq, str):
        try:
            return A_SEQUENCES[a_seq]
        except KeyError:
            raise InvalidInputError(f"unknown sequence {a_seq!r}; choose from {sorted(A_SEQUENCES)}") from None
    if isinstance(a_seq, Mapping):
        table = {int(k): int(v) for k, v in a_seq.items()}
        return lambda n: table.get(n, 0)
    raise InvalidInputError(f"cannot interpret sequence {a_seq!r}")


@dataclass(frozen=True)
class CascadeStep:
    period: int
    center: float
    support: tuple[float, float]
    budget: float
    spawned: int


def cascade_supports(cycle: SHSimpleCycle, plan: ExhaustionPlan, width: float | None = None):
    """Center-coordinate supports, one per planned orbit, pairwise disjoint.

    Each support is centred on the orbit's center coordinate in the P1 chart;
    widths start at ``width`` (default: the transition half-width) and never
    exceed half the gap to the nearest other orbit, so each half-width is at
    most a quarter of that gap.
    """
    centers = np.array([s.solution.q1 + s.solution.Y for s in plan.steps])
    w0 = cycle.t1.kappa.c if width is None else float(width)
    out = []
    for i, c in enumerate(centers):
        others = np.delete(centers, i)
        gap = float(np.min(np.abs(others - c))) if others.size else math.inf
        w = min(w0, 0.5 * gap)
        out.append((float(c), (float(c - w / 2), float(c + w / 2))))
    order = sorted(out, key=lambda t: t[1][0])
    for (_, a), (_, b) in zip(order, order[1:]):
        assert a[1] < b[0], "cascade supports overlap"
    return out


def perturbed_count_table(cycle: SHSimpleCycle, plan: ExhaustionPlan, a_seq, epsilon: float, *,
                          baseline: GrowthTable | None = None, width: float | None = None,
                          details: list | None = None) -> GrowthTable:
    """Periodic-point counts after the cascade: ``count(j) = j * a(j) (+ baseline(j))``."""
    a = resolve_sequence(a_seq)
    supports = cascade_supports(cycle, plan, width)
    counts = {}
    for i, (st, (c, sup)) in enumerate(zip(plan.steps, supports)):
        coc = orbit_center_cocycle(cycle, st.solution)
        try:
            adj = zero_center_exponent(coc, epsilon)
        except BudgetExceededError as exc:
            raise BudgetExceededError(
                f"plan step {i} (period {st.period}, params {tuple(st.params)}): {exc}",
                required=exc.required, epsilon=epsilon, step=i) from None
        j = st.period
        n_new = int(a(j))
        if n_new < 0:
            raise InvalidInputError(f"sequence value a({j}) is negative")
        base = baseline.counts.get(j, 0) if baseline is not None else 0
        counts[j] = j * n_new + base
        if details is not None:
            details.append(CascadeStep(j, c, sup, adj.epsilon_used, n_new))
    return GrowthTable(counts)
