"""Ground truth for the closed forms: compose the model along an itinerary,
solve the affine fixed point directly, and trace the orbit through every
chart and transition region.

Composition order for one loop, starting in the P1 chart::

    F1^m1 o T2 o F2^m2 o T1

and for several loops the first loop of the itinerary is applied first.

Tracing uses a split scheme by default: stable coordinates are propagated
forward, unstable coordinates backward from the closing point, and the center
coordinate backward when the loop's center multiplier exceeds 1 (forward
otherwise). Each block is then iterated in the direction in which the loop
contracts it, so the trace of a periodic point stays accurate for arbitrarily
long loops. ``scheme="forward"``
iterates every block forward, which is exact algebra but amplifies rounding in
the unstable block by roughly ``opnorm(M1)^m1``.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (DegenerateLoopError, EnumerationBudgetError, InvalidInputError,
                     LeftLinearizedRegionError, OutsideTransitionRegionError, ResonanceError)
from .growth import GrowthTable
from .model import FixedPointChart, SHSimpleCycle, TransitionChart
from .solver import LoopParams, PeriodicSolution, RESONANCE_TOL, solve_loop

DEFAULT_BUDGET = 10 ** 6
REL_TOL = 1e-9


# --------------------------------------------------------------------------
# affine algebra

@dataclass(frozen=True)
class AffineBlockMap:
    """``x -> (A_s x_s + b_s, a_c x_c + b_c, A_u x_u + b_u)``."""

    A_s: np.ndarray
    b_s: np.ndarray
    a_c: float
    b_c: float
    A_u: np.ndarray
    b_u: np.ndarray

    @classmethod
    def identity(cls, d_s: int, d_u: int) -> "AffineBlockMap":
        return cls(np.eye(d_s), np.zeros(d_s), 1.0, 0.0, np.eye(d_u), np.zeros(d_u))

    @property
    def d_s(self) -> int:
        return self.A_s.shape[0]

    def apply(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        ds = self.d_s
        return np.concatenate([self.A_s @ p[:ds] + self.b_s,
                               [self.a_c * p[ds] + self.b_c],
                               self.A_u @ p[ds + 1:] + self.b_u])

    def after(self, inner: "AffineBlockMap") -> "AffineBlockMap":
        """Composition ``self o inner``."""
        return AffineBlockMap(self.A_s @ inner.A_s, self.A_s @ inner.b_s + self.b_s,
                              self.a_c * inner.a_c, self.a_c * inner.b_c + self.b_c,
                              self.A_u @ inner.A_u, self.A_u @ inner.b_u + self.b_u)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(x)) for x in
                   (self.A_s, self.b_s, self.a_c, self.b_c, self.A_u, self.b_u))


def chart_map(chart: FixedPointChart, power: int = 1) -> AffineBlockMap:
    d_s, d_u = chart.stable.shape[0], chart.unstable.shape[0]
    return AffineBlockMap(np.linalg.matrix_power(chart.stable, power), np.zeros(d_s),
                          chart.center ** power, 0.0,
                          np.linalg.matrix_power(chart.unstable, power), np.zeros(d_u))


def transition_map(tr: TransitionChart) -> AffineBlockMap:
    d_s = tr.stable.shape[0]
    src, tgt = tr.source_anchor, tr.target_anchor
    return AffineBlockMap(tr.stable, tgt[:d_s] - tr.stable @ src[:d_s],
                          tr.center_multiplier, tgt[d_s] - tr.center_multiplier * src[d_s],
                          tr.unstable, tgt[d_s + 1:] - tr.unstable @ src[d_s + 1:])


# --------------------------------------------------------------------------
# itineraries

def _as_loop(x) -> LoopParams:
    return x if isinstance(x, LoopParams) else LoopParams(*x)


@dataclass(frozen=True)
class Itinerary:
    loops: tuple[LoopParams, ...]

    def __post_init__(self):
        loops = tuple(_as_loop(x) for x in self.loops)
        if not loops:
            raise InvalidInputError("an itinerary needs at least one loop")
        object.__setattr__(self, "loops", loops)

    @classmethod
    def of(cls, *pairs) -> "Itinerary":
        return cls(tuple(pairs))

    def key(self) -> tuple[tuple[int, int], ...]:
        return tuple((lp.m1, lp.m2) for lp in self.loops)

    def period(self, cycle: SHSimpleCycle) -> int:
        return sum(cycle.sigma_total + lp.m1 + lp.m2 for lp in self.loops)

    def canonical(self) -> "Itinerary":
        """Lexicographically smallest cyclic rotation."""
        k = self.key()
        best = min(k[i:] + k[:i] for i in range(len(k)))
        return Itinerary(best)

    def is_canonical(self) -> bool:
        k = self.key()
        return all(k <= k[i:] + k[:i] for i in range(1, len(k)))

    def is_primitive(self) -> bool:
        """False if the loop list repeats a shorter block (the orbit then has a smaller period)."""
        k = self.key()
        n = len(k)
        return not any(n % p == 0 and k == k[:p] * (n // p) for p in range(1, n))

    def __len__(self):
        return len(self.loops)


def _itinerary(it) -> Itinerary:
    if isinstance(it, Itinerary):
        return it
    if isinstance(it, LoopParams):
        return Itinerary((it,))
    it = tuple(it)
    if len(it) == 2 and all(isinstance(x, (int, np.integer)) for x in it):
        return Itinerary((LoopParams(*it),))
    return Itinerary(it)


def loop_return_map(cycle: SHSimpleCycle, it) -> AffineBlockMap:
    """Exact affine composition of the model along ``it``, in P1-chart coordinates."""
    it = _itinerary(it)
    T1, T2 = transition_map(cycle.t1), transition_map(cycle.t2)
    total = AffineBlockMap.identity(cycle.index.d_s, cycle.index.d_u)
    for lp in it.loops:
        total = chart_map(cycle.p1, lp.m1).after(T2.after(chart_map(cycle.p2, lp.m2).after(T1.after(total))))
    return total


def fixed_point(f: AffineBlockMap) -> np.ndarray:
    if abs(1.0 - f.a_c) < RESONANCE_TOL:
        raise ResonanceError(f"center block multiplier {f.a_c!r} is 1: no isolated fixed point",
                             product=f.a_c)
    xc = f.b_c / (1.0 - f.a_c)
    out = []
    for name, A, b in (("stable", f.A_s, f.b_s), ("unstable", f.A_u, f.b_u)):
        lhs = np.eye(A.shape[0]) - A
        try:
            x = np.linalg.solve(lhs, b)
        except np.linalg.LinAlgError as exc:
            raise DegenerateLoopError(f"{name} block I - A is singular", block=name) from exc
        if not np.all(np.isfinite(x)) or np.linalg.cond(lhs) > 1.0 / np.finfo(float).eps:
            raise DegenerateLoopError(f"{name} block I - A is singular", block=name)
        out.append(x)
    return np.concatenate([out[0], [xc], out[1]])


# --------------------------------------------------------------------------
# single steps

def _block_norms(p, d_s):
    p = np.asarray(p, dtype=float)
    return (float(np.linalg.norm(p[:d_s])), abs(float(p[d_s])), float(np.linalg.norm(p[d_s + 1:])))


def local_step(chart: FixedPointChart, p) -> np.ndarray:
    """One iterate of the linear model near a fixed point.

    Raises :class:`LeftLinearizedRegionError` if ``p`` or its image leaves the polydisc.
    """
    d_s = chart.stable.shape[0]
    p = np.asarray(p, dtype=float)
    bounds = (chart.radii.s, chart.radii.c, chart.radii.u)
    for label, q in (("point", p), ("image", None)):
        if q is None:
            q = np.concatenate([chart.stable @ p[:d_s], [chart.center * p[d_s]],
                                chart.unstable @ p[d_s + 1:]])
        for block, n, r in zip(kernels.BLOCK_NAMES, _block_norms(q, d_s), bounds):
            if not n <= r:
                raise LeftLinearizedRegionError(
                    f"{label} leaves the {chart.role.value} polydisc in the {block} block "
                    f"({n:.6g} > {r:.6g})", block=block, value=n, bound=r)
    return q


def transition_step(tr: TransitionChart, p) -> np.ndarray:
    d_s = tr.stable.shape[0]
    offset = np.asarray(p, dtype=float) - tr.source_anchor
    bounds = (tr.kappa.s, tr.kappa.c, tr.kappa.u)
    for block, n, r in zip(kernels.BLOCK_NAMES, _block_norms(offset, d_s), bounds):
        if not n <= r:
            raise OutsideTransitionRegionError(
                f"point outside the {tr.source.value} transition region in the {block} block "
                f"({n:.6g} > {r:.6g})", block=block, value=n, bound=r)
    return tr.target_anchor + np.concatenate([tr.stable @ offset[:d_s],
                                              [tr.center_multiplier * offset[d_s]],
                                              tr.unstable @ offset[d_s + 1:]])


# --------------------------------------------------------------------------
# tracing

class _Packed(NamedTuple):
    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    mu: float
    lam: float
    M1: np.ndarray
    M2: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    M1inv: np.ndarray
    M2inv: np.ndarray
    N1inv: np.ndarray
    N2inv: np.ndarray
    q1: float
    q1p: np.ndarray
    q2: np.ndarray
    q2p: np.ndarray
    radii: np.ndarray
    kappa: np.ndarray
    sigma1: int
    sigma2: int


def pack(cycle: SHSimpleCycle) -> _Packed:
    """Contiguous float arrays for the trace kernel."""
    c = np.ascontiguousarray
    inv = np.linalg.inv
    return _Packed(
        c(cycle.p1.stable), c(cycle.p2.stable), c(cycle.t1.stable), c(cycle.t2.stable),
        cycle.mu, cycle.lam,
        c(cycle.p1.unstable), c(cycle.p2.unstable), c(cycle.t1.unstable), c(cycle.t2.unstable),
        c(inv(cycle.p1.unstable)), c(inv(cycle.p2.unstable)),
        c(inv(cycle.t1.unstable)), c(inv(cycle.t2.unstable)),
        cycle.q1, c(cycle.q1_prime, dtype=float), c(cycle.q2, dtype=float),
        c(cycle.q2_prime, dtype=float),
        np.array([cycle.p1.radii.as_array(), cycle.p2.radii.as_array()]),
        np.array([cycle.t1.kappa.as_array(), cycle.t2.kappa.as_array()]),
        cycle.t1.sigma, cycle.t2.sigma,
    )


@dataclass(frozen=True)
class OrbitTrace:
    """Recorded orbit up to and including the first region violation."""

    coords: np.ndarray
    charts: tuple[str, ...]
    steps: np.ndarray
    regions: tuple[str, ...]
    memberships: tuple[bool, ...]
    all_valid: bool
    failure: tuple[int, str, str] | None
    closes: bool
    closure_error: float

    @property
    def points(self):
        return [(ch, self.coords[i], int(self.steps[i])) for i, ch in enumerate(self.charts)]

    @property
    def final_point(self) -> np.ndarray:
        return self.coords[-1]

    @property
    def reason(self) -> str:
        if self.failure is None:
            return "" if self.closes else "orbit does not close"
        i, region, block = self.failure
        return f"{block} region violated at record {i} ({region})"


def _close(a, b):
    return np.allclose(a, b, rtol=REL_TOL, atol=1e-12)


def _trace_arrays(packed: _Packed, loops: np.ndarray, start: np.ndarray, split: bool, kernel=None):
    kernel = kernels.trace if kernel is None else kernel
    log_s = float(np.sum(loops[:, 0]) * math.log(packed.mu) + np.sum(loops[:, 1]) * math.log(packed.lam))
    return kernel(packed.A1, packed.A2, packed.B1, packed.B2, packed.mu, packed.lam,
                  packed.M1, packed.M2, packed.N1, packed.N2,
                  packed.M1inv, packed.M2inv, packed.N1inv, packed.N2inv,
                  packed.q1, packed.q1p, packed.q2, packed.q2p, packed.radii, packed.kappa,
                  loops, packed.sigma1, packed.sigma2, start, split, log_s > 0.0)


def _loops_array(it: Itinerary) -> np.ndarray:
    return np.array(it.key(), dtype=np.int64).reshape(-1, 2)


def trace_orbit(cycle: SHSimpleCycle, it, start, scheme: str = "split", *,
                packed: _Packed | None = None, kernel=None) -> OrbitTrace:
    it = _itinerary(it)
    if scheme not in ("split", "forward"):
        raise InvalidInputError(f"unknown trace scheme {scheme!r}")
    start = np.ascontiguousarray(start, dtype=float)
    if start.shape != (cycle.index.dim,) or not np.all(np.isfinite(start)):
        raise InvalidInputError(f"start must be a finite vector of length {cycle.index.dim}")
    packed = pack(cycle) if packed is None else packed
    loops = _loops_array(it)
    pts, kind, region, step, fail = _trace_arrays(packed, loops, start, scheme == "split", kernel)
    bad = np.flatnonzero(fail >= 0)
    ds = cycle.index.d_s
    if bad.size:
        stop = int(bad[0])
        failure = (stop, kernels.REGION_NAMES[region[stop]], kernels.BLOCK_NAMES[fail[stop]])
        closes, err = False, math.inf
    else:
        stop = len(fail) - 1
        failure = None
        if scheme == "split":
            # blocks propagated backward are compared at the first record
            c_back = loops[:, 0].sum() * math.log(cycle.mu) + loops[:, 1].sum() * math.log(cycle.lam) > 0
            got = np.concatenate([pts[-1, :ds], pts[0 if c_back else -1, ds:ds + 1], pts[0, ds + 1:]])
        else:
            got = pts[-1]
        closes = bool(_close(got, start))
        err = float(np.max(np.abs(got - start)))
    sl = slice(0, stop + 1)
    charts = tuple("P2" if k in (kernels.KIND_T1, kernels.KIND_P2) else "P1" for k in kind[sl])
    return OrbitTrace(
        coords=pts[sl],
        charts=charts,
        steps=step[sl],
        regions=tuple(kernels.REGION_NAMES[g] for g in region[sl]),
        memberships=tuple(bool(f < 0) for f in fail[sl]),
        all_valid=failure is None,
        failure=failure,
        closes=closes,
        closure_error=err,
    )


def rel_error(a, b) -> float:
    """Largest componentwise relative difference ``|a - b| / max(|a|, |b|)`` (0 where both vanish)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    d = np.abs(a - b)
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(d == 0, 0.0, d / scale)
    return float(np.max(r)) if r.size else 0.0


@dataclass(frozen=True)
class VerificationReport:
    params: LoopParams
    max_rel_error: float
    oracle_point: np.ndarray
    trace: OrbitTrace
    all_valid: bool
    periodic: bool
    empirical_realizable: bool
    reason: str


def verify_solution(cycle: SHSimpleCycle, sol: PeriodicSolution, *,
                    packed: _Packed | None = None, kernel=None) -> VerificationReport:
    it = Itinerary((sol.params,))
    try:
        fp = fixed_point(loop_return_map(cycle, it))
        err = rel_error(sol.point, fp)
    except (ResonanceError, DegenerateLoopError):
        fp = np.full(cycle.index.dim, np.nan)
        err = math.inf
    tr = trace_orbit(cycle, it, sol.point, packed=packed, kernel=kernel)
    agrees = err <= REL_TOL
    ok = agrees and tr.all_valid and tr.closes
    if ok:
        reason = ""
    elif not tr.all_valid:
        reason = tr.reason
    elif not tr.closes:
        reason = "periodicity check failed: returned point differs from start"
    else:
        reason = f"closed form disagrees with fixed point (relative error {err:.3e})"
    return VerificationReport(sol.params, err, fp, tr, tr.all_valid, tr.closes, ok, reason)


def verify_params(cycle: SHSimpleCycle, params, **kw) -> tuple[PeriodicSolution, VerificationReport]:
    sol = solve_loop(cycle, params)
    return sol, verify_solution(cycle, sol, **kw)


def realizability_floor(cycle: SHSimpleCycle, m_max: int = 50, cap: int = 30):
    """Smallest M0 such that every analytic-realizable pair with m1, m2 in [M0, m_max] verifies.

    Returns ``(M0, failing_pairs)``; ``M0`` is None when it would exceed ``cap``.
    """
    packed = pack(cycle)
    failing = []
    for m1 in range(1, m_max + 1):
        for m2 in range(1, m_max + 1):
            try:
                sol, rep = verify_params(cycle, (m1, m2), packed=packed)
            except (ResonanceError, DegenerateLoopError):
                continue
            if sol.analytic_realizable and not rep.empirical_realizable:
                failing.append((m1, m2))
    m0 = 1 + max((min(p) for p in failing), default=0)
    return (m0 if m0 <= cap else None), failing


# --------------------------------------------------------------------------
# census

class PeriodicPoint(NamedTuple):
    itinerary: Itinerary
    point: np.ndarray
    empirical_realizable: bool


def _budget(budget):
    if budget is not None:
        return int(budget)
    env = os.environ.get("SHC_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def itinerary_count(cycle: SHSimpleCycle, n: int, max_loops: int) -> int:
    """Number of loop compositions of total period ``n`` with at most ``max_loops`` loops."""
    total = 0
    for k in range(1, max_loops + 1):
        rest = n - k * cycle.sigma_total
        if rest >= 2 * k:
            total += math.comb(rest - 1, 2 * k - 1)
    return total


def _compositions(total: int, parts: int):
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def _candidate_itineraries(cycle: SHSimpleCycle, n: int, max_loops: int):
    for k in range(1, max_loops + 1):
        rest = n - k * cycle.sigma_total
        if rest < 2 * k:
            continue
        for parts in _compositions(rest, 2 * k):
            key = tuple(zip(parts[0::2], parts[1::2]))
            it = Itinerary(key)
            if it.is_canonical() and it.is_primitive():
                yield it


def _check_itinerary(cycle, packed, it, kernel=None):
    try:
        fp = fixed_point(loop_return_map(cycle, it))
    except (ResonanceError, DegenerateLoopError):
        return None
    if not np.all(np.isfinite(fp)):
        return None
    tr = trace_orbit(cycle, it, fp, packed=packed, kernel=kernel)
    return PeriodicPoint(it, fp, bool(tr.all_valid and tr.closes))


def enumerate_periodic_points(cycle: SHSimpleCycle, n: int, max_loops: int, *,
                              budget: int | None = None, workers: int = 1,
                              kernel=None) -> list[PeriodicPoint]:
    """All realizable model periodic orbits of exact period ``n``, one point per orbit.

    Each orbit is represented by its canonical (smallest-rotation) itinerary and
    the corresponding point in the P1 transition region. Output is sorted by
    itinerary and does not depend on ``workers``.
    """
    if max_loops < 1:
        raise InvalidInputError("max_loops must be >= 1")
    cap = _budget(budget)
    need = itinerary_count(cycle, n, max_loops)
    if need > cap:
        raise EnumerationBudgetError(
            f"period {n} with up to {max_loops} loops needs {need} itineraries (budget {cap})",
            required=need, budget=cap)
    packed = pack(cycle)
    cands = list(_candidate_itineraries(cycle, n, max_loops))
    if workers > 1 and len(cands) > 1:
        chunks = [cands[i::workers] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = ex.map(lambda ch: [_check_itinerary(cycle, packed, it, kernel) for it in ch], chunks)
            found = [r for part in parts for r in part]
    else:
        found = [_check_itinerary(cycle, packed, it, kernel) for it in cands]
    found = [r for r in found if r is not None and r.empirical_realizable]
    found.sort(key=lambda r: r.itinerary.key())
    return found


def count_table(cycle: SHSimpleCycle, n_min: int, n_max: int, max_loops: int, *,
                budget: int | None = None, workers: int = 1) -> GrowthTable:
    """``n -> number of model periodic points of exact period n`` (orbit count times n)."""
    if n_min > n_max:
        raise InvalidInputError("n_min must not exceed n_max")
    counts = {}
    for n in range(n_min, n_max + 1):
        orbits = enumerate_periodic_points(cycle, n, max_loops, budget=budget, workers=workers)
        counts[n] = n * len(orbits)
    return GrowthTable(counts)

