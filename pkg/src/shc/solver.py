"""Closed-form periodic points for a single turn around the cycle.

A loop ``(m1, m2)`` starts at ``R = (X, q1 + Y, Z)`` in the P1 chart, takes
the P1 -> P2 transition, spends ``m2`` iterates near P2, takes the P2 -> P1
transition and spends ``m1`` iterates near P1 before closing up. The three
coordinate blocks decouple, so each has its own linear equation:

    X = (I - A1^m1 B2 A2^m2 B1)^-1 A1^m1 (q2' + B2 A2^m2 q1')
    Y = q1 / (mu^m1 lambda^m2 - 1)
    Z = (M2^m2 N1 - N2^-1 M1^-m1)^-1 q2

with ``A``/``M`` the chart blocks and ``B``/``N`` the transition blocks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateLoopError, InvalidInputError, ResonanceError
from .model import SHSimpleCycle

RESONANCE_TOL = 1e-12


@dataclass(frozen=True, order=True)
class LoopParams:
    m1: int
    m2: int

    def __post_init__(self):
        if int(self.m1) != self.m1 or int(self.m2) != self.m2:
            raise InvalidInputError("loop parameters must be integers")
        object.__setattr__(self, "m1", int(self.m1))
        object.__setattr__(self, "m2", int(self.m2))
        if self.m1 < 1 or self.m2 < 1:
            raise InvalidInputError(f"need m1, m2 >= 1, got ({self.m1}, {self.m2})")

    def __iter__(self):
        yield self.m1
        yield self.m2


@dataclass(frozen=True)
class PeriodicSolution:
    params: LoopParams
    X: np.ndarray
    Y: float
    Z: np.ndarray
    period: int
    center_exponent: float
    analytic_realizable: bool
    product_s: float
    q1: float

    @property
    def point(self) -> np.ndarray:
        """Coordinates of the periodic point in the P1 chart.

        The center entry ``q1 + Y`` is evaluated as ``q1 s / (s - 1)``, which
        avoids the cancellation of ``q1 + Y`` when ``s`` is small.
        """
        s = self.product_s
        return np.concatenate([self.X, [self.q1 * s / (s - 1.0)], self.Z])


def _params(params) -> LoopParams:
    return params if isinstance(params, LoopParams) else LoopParams(*params)


def center_product(cycle: SHSimpleCycle, params) -> float:
    m1, m2 = _params(params)
    return cycle.mu ** m1 * cycle.lam ** m2


def loop_period(cycle: SHSimpleCycle, params) -> int:
    m1, m2 = _params(params)
    return cycle.t1.sigma + m2 + cycle.t2.sigma + m1


def log_multiplier(cycle: SHSimpleCycle, params) -> float:
    """``m2 log(lambda) + m1 log(mu)``, the log of the loop's center multiplier."""
    m1, m2 = _params(params)
    return m2 * math.log(cycle.lam) + m1 * math.log(cycle.mu)


def center_solution(cycle: SHSimpleCycle, params) -> float:
    p = _params(params)
    s = center_product(cycle, p)
    if abs(s - 1.0) < RESONANCE_TOL:
        raise ResonanceError(f"mu^m1 lambda^m2 = {s!r} is resonant for {tuple(p)}",
                             product=s, params=p)
    return cycle.q1 / (s - 1.0)


def center_solution_exact(mu, lam, q1, params) -> Fraction:
    """Rational version of :func:`center_solution` for exactly representable inputs."""
    m1, m2 = _params(params)
    mu, lam, q1 = Fraction(mu), Fraction(lam), Fraction(q1)
    s = mu ** m1 * lam ** m2
    if s == 1:
        raise ResonanceError("exact resonance mu^m1 lambda^m2 = 1", product=s, params=(m1, m2))
    return q1 / (s - 1)


def _solve(A, b, block, p):
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateLoopError(f"{block} system singular for {tuple(p)}", block, p) from exc
    if not np.all(np.isfinite(x)) or np.linalg.cond(A) > 1.0 / np.finfo(float).eps:
        raise DegenerateLoopError(f"{block} system singular for {tuple(p)}", block, p)
    return x


def stable_solution(cycle: SHSimpleCycle, params) -> np.ndarray:
    p = _params(params)
    A1m = np.linalg.matrix_power(cycle.p1.stable, p.m1)
    A2m = np.linalg.matrix_power(cycle.p2.stable, p.m2)
    B1, B2 = cycle.t1.stable, cycle.t2.stable
    ret = A1m @ B2 @ A2m @ B1
    rhs = A1m @ (cycle.q2_prime + B2 @ (A2m @ cycle.q1_prime))
    return _solve(np.eye(cycle.index.d_s) - ret, rhs, "stable", p)


def unstable_solution(cycle: SHSimpleCycle, params) -> np.ndarray:
    p = _params(params)
    M1inv = np.linalg.inv(cycle.p1.unstable)
    M1inv_m = np.linalg.matrix_power(M1inv, p.m1)
    M2m = np.linalg.matrix_power(cycle.p2.unstable, p.m2)
    N1 = cycle.t1.unstable
    N2inv = np.linalg.inv(cycle.t2.unstable)
    return _solve(M2m @ N1 - N2inv @ M1inv_m, np.asarray(cycle.q2, dtype=float), "unstable", p)


def realizability_threshold(cycle: SHSimpleCycle) -> float:
    """Multiplier above which the center coordinate is guaranteed to sit in the transition region."""
    return abs(cycle.q1) / cycle.t1.kappa.c + 1.0


def center_lyapunov(cycle: SHSimpleCycle, params) -> float:
    p = _params(params)
    return log_multiplier(cycle, p) / loop_period(cycle, p)


def solve_loop(cycle: SHSimpleCycle, params) -> PeriodicSolution:
    p = _params(params)
    Y = center_solution(cycle, p)
    X = stable_solution(cycle, p)
    Z = unstable_solution(cycle, p)
    s = center_product(cycle, p)
    X.setflags(write=False)
    Z.setflags(write=False)
    return PeriodicSolution(
        params=p, X=X, Y=Y, Z=Z,
        period=loop_period(cycle, p),
        center_exponent=center_lyapunov(cycle, p),
        analytic_realizable=bool(s > realizability_threshold(cycle)),
        product_s=s,
        q1=cycle.q1,
    )
