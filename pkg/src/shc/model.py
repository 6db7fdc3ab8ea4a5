"""Piecewise-affine local model of an SH-simple heterodimensional cycle.

Coordinates in every chart are ordered ``(stable, center, unstable)`` with
block sizes ``(d_s, 1, d_u)``. A point is a flat float vector of length
``d_s + 1 + d_u``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError, SingularMatrixError


class Role(str, enum.Enum):
    P1 = "P1"
    P2 = "P2"


def _matrix(a) -> np.ndarray:
    m = np.array(a, dtype=float, copy=True)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1 and m.size == 1:
        m = m.reshape(1, 1)
    m.setflags(write=False)
    return m


def _vector(a) -> np.ndarray:
    v = np.array(a, dtype=float, copy=True).reshape(-1)
    v.setflags(write=False)
    return v


def opnorm(A) -> float:
    """Operator 2-norm (largest singular value)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def minexp(A) -> float:
    """Minimum expansion ``1 / opnorm(inv(A))``, i.e. the smallest singular value."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")
    if A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"minexp needs a square matrix, got shape {A.shape}")
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] == 0.0 or sv[-1] <= sv[0] * A.shape[0] * np.finfo(float).eps:
        raise SingularMatrixError("matrix is singular")
    return float(sv[-1])


@dataclass(frozen=True)
class CycleIndex:
    d_s: int
    d_u: int
    d_c: int = 1

    @property
    def dim(self) -> int:
        return self.d_s + self.d_c + self.d_u

    def split(self, p):
        """Split a point into its (stable, center, unstable) blocks."""
        p = np.asarray(p, dtype=float)
        return p[: self.d_s], p[self.d_s], p[self.d_s + 1:]


@dataclass(frozen=True)
class PolydiscRadii:
    s: float
    c: float
    u: float

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.c, self.u], dtype=float)


@dataclass(frozen=True)
class FixedPointChart:
    """Linearized neighbourhood of a hyperbolic fixed point.

    ``center`` is the center multiplier: mu > 1 for P1, 0 < lambda < 1 for P2.
    """

    role: Role
    stable: np.ndarray
    center: float
    unstable: np.ndarray
    radii: PolydiscRadii

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))
        object.__setattr__(self, "stable", _matrix(self.stable))
        object.__setattr__(self, "unstable", _matrix(self.unstable))
        object.__setattr__(self, "center", float(self.center))

    def __eq__(self, other):
        if not isinstance(other, FixedPointChart):
            return NotImplemented
        return (self.role == other.role and self.center == other.center
                and self.radii == other.radii
                and np.array_equal(self.stable, other.stable)
                and np.array_equal(self.unstable, other.unstable))

    __hash__ = None


@dataclass(frozen=True)
class TransitionChart:
    """Affine transition from the source chart to the other chart after ``sigma`` iterates."""

    source: Role
    sigma: int
    stable: np.ndarray
    unstable: np.ndarray
    source_anchor: np.ndarray
    target_anchor: np.ndarray
    kappa: PolydiscRadii
    center_multiplier: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "source", Role(self.source))
        object.__setattr__(self, "sigma", int(self.sigma))
        object.__setattr__(self, "stable", _matrix(self.stable))
        object.__setattr__(self, "unstable", _matrix(self.unstable))
        object.__setattr__(self, "source_anchor", _vector(self.source_anchor))
        object.__setattr__(self, "target_anchor", _vector(self.target_anchor))
        object.__setattr__(self, "center_multiplier", float(self.center_multiplier))

    def __eq__(self, other):
        if not isinstance(other, TransitionChart):
            return NotImplemented
        return (self.source == other.source and self.sigma == other.sigma
                and self.center_multiplier == other.center_multiplier
                and self.kappa == other.kappa
                and np.array_equal(self.stable, other.stable)
                and np.array_equal(self.unstable, other.unstable)
                and np.array_equal(self.source_anchor, other.source_anchor)
                and np.array_equal(self.target_anchor, other.target_anchor))

    __hash__ = None


@dataclass(frozen=True)
class SHSimpleCycle:
    index: CycleIndex
    p1: FixedPointChart
    p2: FixedPointChart
    t1: TransitionChart
    t2: TransitionChart

    # Shorthands for the scalar and anchor data used throughout the solver.
    @property
    def mu(self) -> float:
        return self.p1.center

    @property
    def lam(self) -> float:
        return self.p2.center

    @property
    def q1(self) -> float:
        return float(self.t1.source_anchor[self.index.d_s])

    @property
    def q1_prime(self) -> np.ndarray:
        return self.t1.target_anchor[: self.index.d_s]

    @property
    def q2(self) -> np.ndarray:
        return self.t2.source_anchor[self.index.d_s + 1:]

    @property
    def q2_prime(self) -> np.ndarray:
        return self.t2.target_anchor[: self.index.d_s]

    @property
    def sigma_total(self) -> int:
        return self.t1.sigma + self.t2.sigma

    def replace(self, **changes) -> "SHSimpleCycle":
        return replace(self, **changes)


@dataclass(frozen=True)
class AxiomFailure:
    axiom: str
    detail: str
    value: float | None = None


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    failures: tuple[AxiomFailure, ...] = ()
    warnings: tuple[str, ...] = ()

    def axioms(self) -> list[str]:
        return [f.axiom for f in self.failures]


# --------------------------------------------------------------------------
# validation

def _check_chart(chart: FixedPointChart, index: CycleIndex, fail):
    name = chart.role.value
    r = chart.radii
    if not (r.s > 0 and r.c > 0 and r.u > 0):
        fail(f"{name}.radii", f"{name} polydisc radii must be positive", min(r.s, r.c, r.u))
    if chart.stable.shape != (index.d_s, index.d_s):
        fail(f"{name}.shape", f"{name} stable block has shape {chart.stable.shape}", None)
        return
    if chart.unstable.shape != (index.d_u, index.d_u):
        fail(f"{name}.shape", f"{name} unstable block has shape {chart.unstable.shape}", None)
        return
    t = chart.center
    try:
        ns = opnorm(chart.stable)
        mu_u = minexp(chart.unstable)
    except (InvalidInputError, SingularMatrixError) as exc:
        fail(f"{name}.finite_invertible", f"{name} blocks: {exc}", None)
        return
    if chart.role is Role.P1:
        if not ns < 1:
            fail("P1.stable_contraction", "P1 stable block not contracting", ns)
        if not t > 1:
            fail("P1.center_expanding", "P1 center multiplier not > 1", t)
        if not mu_u > t:
            fail("P1.unstable_dominates_center",
                 "P1 unstable minimum expansion not > center multiplier", mu_u)
    else:
        if not ns < t:
            fail("P2.stable_dominated_by_center",
                 "P2 stable norm not < center multiplier", ns)
        if not 0 < t < 1:
            fail("P2.center_contracting", "P2 center multiplier not in (0, 1)", t)
        if not mu_u > 1:
            fail("P2.unstable_expanding", "P2 unstable minimum expansion not > 1", mu_u)
    if t > 0:
        if not ns / t < 1:
            fail(f"{name}.domination_stable_center",
                 f"{name} stable/center domination product not < 1", ns / t)
        if not t / mu_u < 1:
            fail(f"{name}.domination_center_unstable",
                 f"{name} center/unstable domination product not < 1", t / mu_u)


def _check_transition(tr: TransitionChart, expected: Role, src: FixedPointChart,
                      index: CycleIndex, fail):
    name = "T1" if expected is Role.P1 else "T2"
    if tr.source is not expected:
        fail(f"{name}.source", f"{name} must start in {expected.value}", None)
    if tr.center_multiplier != 1.0:
        fail(f"{name}.center_multiplier", "center multiplier ≠ 1", tr.center_multiplier)
    if tr.sigma < 1:
        fail(f"{name}.sigma", f"{name} transition time must be >= 1", tr.sigma)
    k = tr.kappa
    if not (k.s > 0 and k.c > 0 and k.u > 0):
        fail(f"{name}.kappa", f"{name} transition radii must be positive", min(k.s, k.c, k.u))
    if tr.stable.shape != (index.d_s, index.d_s) or tr.unstable.shape != (index.d_u, index.d_u):
        fail(f"{name}.shape", f"{name} block shapes inconsistent with index", None)
        return
    for label, block in (("stable", tr.stable), ("unstable", tr.unstable)):
        try:
            minexp(block)
        except (InvalidInputError, SingularMatrixError):
            fail(f"{name}.invertible", f"{name} {label} block is not invertible", None)
    if tr.source_anchor.shape != (index.dim,) or tr.target_anchor.shape != (index.dim,):
        fail(f"{name}.shape", f"{name} anchors must have length {index.dim}", None)
        return
    xs, xc, xu = index.split(tr.source_anchor)
    ys, yc, yu = index.split(tr.target_anchor)
    if expected is Role.P1:
        if np.any(xs != 0) or np.any(xu != 0):
            fail("T1.source_anchor", "T1 source anchor must be (0, q1, 0)", None)
        if xc == 0:
            fail("T1.anchor_nonzero", "q1 must be nonzero", 0.0)
        anchor_s, anchor_c, anchor_u = 0.0, abs(xc), 0.0
    else:
        if np.any(xs != 0) or xc != 0:
            fail("T2.source_anchor", "T2 source anchor must be (0, 0, q2)", None)
        if not np.any(xu != 0):
            fail("T2.anchor_nonzero", "q2 must be nonzero", 0.0)
        anchor_s, anchor_c, anchor_u = 0.0, 0.0, float(np.linalg.norm(xu))
    if yc != 0 or np.any(yu != 0):
        fail(f"{name}.target_anchor", f"{name} target anchor must be (q', 0, 0)", None)
    r = src.radii
    if not (anchor_s + k.s <= r.s and anchor_c + k.c <= r.c and anchor_u + k.u <= r.u):
        fail(f"{name}.region_inside_chart",
             f"{name} transition region not inside the {expected.value} polydisc", None)


def validate_cycle(cycle: SHSimpleCycle) -> ValidationReport:
    """Check every axiom of the local model. Failures are returned, never raised."""
    failures: list[AxiomFailure] = []

    def fail(axiom, detail, value):
        failures.append(AxiomFailure(axiom, detail, None if value is None else float(value)))

    idx = cycle.index
    if idx.d_s < 1 or idx.d_u < 1 or idx.d_c != 1:
        fail("index.dimensions", "need d_s >= 1, d_u >= 1 and d_c == 1", None)
        return ValidationReport(False, tuple(failures))
    if cycle.p1.role is not Role.P1 or cycle.p2.role is not Role.P2:
        fail("charts.roles", "p1/p2 must carry roles P1/P2", None)
    _check_chart(cycle.p1, idx, fail)
    _check_chart(cycle.p2, idx, fail)
    _check_transition(cycle.t1, Role.P1, cycle.p1, idx, fail)
    _check_transition(cycle.t2, Role.P2, cycle.p2, idx, fail)

    warnings: list[str] = []
    if not failures:
        warnings.extend(w.message for w in resonance_check(cycle, 10))
        for name, tr, tgt in (("T1", cycle.t1, cycle.p2), ("T2", cycle.t2, cycle.p1)):
            ys = tr.target_anchor[: idx.d_s]
            if np.linalg.norm(ys) > tgt.radii.s:
                warnings.append(f"{name} target anchor lies outside the target polydisc")
    return ValidationReport(not failures, tuple(failures), tuple(warnings))


@dataclass(frozen=True)
class ResonanceWarning:
    a: int
    b: int
    value: float

    @property
    def message(self) -> str:
        return f"near resonance: {self.a}*log(mu) + {self.b}*log(lambda) = {self.value:.3e}"


def resonance_check(cycle: SHSimpleCycle, max_coeff: int, tol: float = 1e-9) -> list[ResonanceWarning]:
    """Scan integer pairs 1 <= |a|, |b| <= max_coeff for a*log(mu) + b*log(lambda) ~ 0.

    Pairs are taken with ``a > 0``; ``(-a, -b)`` gives the same relation.
    """
    if max_coeff < 1:
        raise InvalidInputError("max_coeff must be a positive integer")
    lm, ll = math.log(cycle.mu), math.log(cycle.lam)
    out = []
    for a in range(1, max_coeff + 1):
        for b in itertools.chain(range(-max_coeff, 0), range(1, max_coeff + 1)):
            v = a * lm + b * ll
            if abs(v) < tol:
                out.append(ResonanceWarning(a, b, v))
    return out


# --------------------------------------------------------------------------
# fixtures

def canonical_cycle() -> SHSimpleCycle:
    """The C0 test cycle: one-dimensional blocks, mu = 2, lambda = 1/3."""
    one = PolydiscRadii(1.0, 1.0, 1.0)
    kappa = PolydiscRadii(0.1, 0.1, 0.1)
    return SHSimpleCycle(
        index=CycleIndex(1, 1),
        p1=FixedPointChart(Role.P1, [[0.4]], 2.0, [[5.0]], one),
        p2=FixedPointChart(Role.P2, [[0.2]], 1.0 / 3.0, [[4.0]], one),
        t1=TransitionChart(Role.P1, 1, [[0.5]], [[1.5]],
                           source_anchor=[0.0, 0.5, 0.0], target_anchor=[0.3, 0.0, 0.0],
                           kappa=kappa),
        t2=TransitionChart(Role.P2, 1, [[0.5]], [[1.5]],
                           source_anchor=[0.0, 0.0, 0.6], target_anchor=[0.3, 0.0, 0.0],
                           kappa=kappa),
    )


def _random_matrix(rng, d, lo, hi):
    q1, _ = np.linalg.qr(rng.standard_normal((d, d)))
    q2, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return q1 @ np.diag(rng.uniform(lo, hi, size=d)) @ q2


def _random_direction(rng, d, norm):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v) * norm


def random_cycle(rng: np.random.Generator, d_s: int | None = None,
                 d_u: int | None = None) -> SHSimpleCycle:
    """Draw a cycle satisfying every axiom, with singular values spread moderately."""
    d_s = int(rng.integers(1, 4)) if d_s is None else d_s
    d_u = int(rng.integers(1, 4)) if d_u is None else d_u
    mu = float(rng.uniform(1.3, 3.0))
    lam = float(rng.uniform(0.2, 0.75))
    one = PolydiscRadii(1.0, 1.0, 1.0)
    p1 = FixedPointChart(Role.P1, _random_matrix(rng, d_s, 0.1, 0.8), mu,
                         _random_matrix(rng, d_u, 1.2 * mu, 1.6 * mu), one)
    p2 = FixedPointChart(Role.P2, _random_matrix(rng, d_s, 0.2 * lam, 0.8 * lam), lam,
                         _random_matrix(rng, d_u, 1.3, 2.5), one)
    k1 = PolydiscRadii(*rng.uniform(0.05, 0.15, size=3))
    k2 = PolydiscRadii(*rng.uniform(0.05, 0.15, size=3))
    q1 = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 0.6))
    q2 = _random_direction(rng, d_u, rng.uniform(0.3, 0.6))
    t1 = TransitionChart(Role.P1, int(rng.integers(1, 4)),
                         _random_matrix(rng, d_s, 0.5, 1.5), _random_matrix(rng, d_u, 0.5, 1.5),
                         source_anchor=np.concatenate([np.zeros(d_s), [q1], np.zeros(d_u)]),
                         target_anchor=np.concatenate(
                             [_random_direction(rng, d_s, rng.uniform(0.1, 0.5)), [0.0], np.zeros(d_u)]),
                         kappa=k1)
    t2 = TransitionChart(Role.P2, int(rng.integers(1, 4)),
                         _random_matrix(rng, d_s, 0.5, 1.5), _random_matrix(rng, d_u, 0.5, 1.5),
                         source_anchor=np.concatenate([np.zeros(d_s), [0.0], q2]),
                         target_anchor=np.concatenate(
                             [_random_direction(rng, d_s, rng.uniform(0.1, 0.5)), [0.0], np.zeros(d_u)]),
                         kappa=k2)
    return SHSimpleCycle(CycleIndex(d_s, d_u), p1, p2, t1, t2)
