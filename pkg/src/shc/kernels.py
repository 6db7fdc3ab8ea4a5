"""Hot loops: orbit tracing along an itinerary and sign/derivative scans of bumps.

Each kernel exists as a ``*_py`` reference (plain numpy) and a ``*_jit``
numba-compiled twin; the unsuffixed name is whichever ``SHC_NUMBA`` selects.

Trace records
-------------
In the split scheme the stable block is propagated forward and the unstable
block backward from the closing record; the center block goes backward when
``center_backward`` is set (loop center multiplier > 1), forward otherwise.

A trace of an itinerary with loops ``(m1_i, m2_i)`` has
``1 + sum(2 + m1_i + m2_i)`` records. Record kinds::

    0  start (P1 chart, must lie in the P1 transition region)
    1  image of the P1 -> P2 transition
    2  image of one P2 local step
    3  image of the P2 -> P1 transition
    4  image of one P1 local step

Region codes: 0 P1 polydisc, 1 P2 polydisc, 2 P1 transition region,
3 P2 transition region. The last P2 step of a loop must land in region 3 and
the last P1 step in region 2.
"""
import math

import numpy as np

from ._accel import HAVE_NUMBA, NUMBA_ENABLED, njit

KIND_START, KIND_T1, KIND_P2, KIND_T2, KIND_P1 = 0, 1, 2, 3, 4
REGION_P1, REGION_P2, REGION_K1, REGION_K2 = 0, 1, 2, 3
BLOCK_NAMES = ("stable", "center", "unstable")
REGION_NAMES = ("P1 polydisc", "P2 polydisc", "P1 transition region", "P2 transition region")


def _trace_impl(A1, A2, B1, B2, mu, lam, M1, M2, N1, N2, M1inv, M2inv, N1inv, N2inv,
                q1, q1p, q2, q2p, radii, kappa, loops, sigma1, sigma2, start, split,
                center_backward):
    ds = A1.shape[0]
    du = M1.shape[0]
    d = ds + 1 + du
    n_rec = 1
    for i in range(loops.shape[0]):
        n_rec += 2 + loops[i, 0] + loops[i, 1]

    pts = np.zeros((n_rec, d))
    kind = np.zeros(n_rec, dtype=np.int64)
    region = np.zeros(n_rec, dtype=np.int64)
    step = np.zeros(n_rec, dtype=np.int64)
    fail = np.full(n_rec, -1, dtype=np.int64)

    for j in range(d):
        pts[0, j] = start[j]
    kind[0] = KIND_START
    region[0] = REGION_K1

    # stable and center blocks: forward (center may be redone backward below)
    r = 0
    t = 0
    for i in range(loops.shape[0]):
        m1 = loops[i, 0]
        m2 = loops[i, 1]
        r += 1
        t += sigma1
        pts[r, :ds] = q1p + np.dot(B1, pts[r - 1, :ds])
        pts[r, ds] = pts[r - 1, ds] - q1
        kind[r] = KIND_T1
        region[r] = REGION_P2
        step[r] = t
        for k in range(m2):
            r += 1
            t += 1
            pts[r, :ds] = np.dot(A2, pts[r - 1, :ds])
            pts[r, ds] = lam * pts[r - 1, ds]
            kind[r] = KIND_P2
            region[r] = REGION_K2 if k == m2 - 1 else REGION_P2
            step[r] = t
        r += 1
        t += sigma2
        pts[r, :ds] = q2p + np.dot(B2, pts[r - 1, :ds])
        pts[r, ds] = pts[r - 1, ds]
        kind[r] = KIND_T2
        region[r] = REGION_P1
        step[r] = t
        for k in range(m1):
            r += 1
            t += 1
            pts[r, :ds] = np.dot(A1, pts[r - 1, :ds])
            pts[r, ds] = mu * pts[r - 1, ds]
            kind[r] = KIND_P1
            region[r] = REGION_K1 if k == m1 - 1 else REGION_P1
            step[r] = t

    if split and center_backward:
        pts[n_rec - 1, ds] = start[ds]
        for r in range(n_rec - 1, 0, -1):
            c = pts[r, ds]
            if kind[r] == KIND_P1:
                pts[r - 1, ds] = c / mu
            elif kind[r] == KIND_P2:
                pts[r - 1, ds] = c / lam
            elif kind[r] == KIND_T1:
                pts[r - 1, ds] = c + q1
            else:
                pts[r - 1, ds] = c

    # unstable block: backward from the closing record (split) or forward
    if split:
        pts[n_rec - 1, ds + 1:] = start[ds + 1:]
        for r in range(n_rec - 1, 0, -1):
            u = pts[r, ds + 1:]
            if kind[r] == KIND_P1:
                pts[r - 1, ds + 1:] = np.dot(M1inv, u)
            elif kind[r] == KIND_T2:
                pts[r - 1, ds + 1:] = q2 + np.dot(N2inv, u)
            elif kind[r] == KIND_P2:
                pts[r - 1, ds + 1:] = np.dot(M2inv, u)
            else:
                pts[r - 1, ds + 1:] = np.dot(N1inv, u)
    else:
        for r in range(1, n_rec):
            u = pts[r - 1, ds + 1:]
            if kind[r] == KIND_P1:
                pts[r, ds + 1:] = np.dot(M1, u)
            elif kind[r] == KIND_T2:
                pts[r, ds + 1:] = np.dot(N2, u - q2)
            elif kind[r] == KIND_P2:
                pts[r, ds + 1:] = np.dot(M2, u)
            else:
                pts[r, ds + 1:] = np.dot(N1, u)

    # closed-polydisc membership
    for r in range(n_rec):
        g = region[r]
        if g == REGION_P1:
            bs, bc, bu = radii[0, 0], radii[0, 1], radii[0, 2]
        elif g == REGION_P2:
            bs, bc, bu = radii[1, 0], radii[1, 1], radii[1, 2]
        elif g == REGION_K1:
            bs, bc, bu = kappa[0, 0], kappa[0, 1], kappa[0, 2]
        else:
            bs, bc, bu = kappa[1, 0], kappa[1, 1], kappa[1, 2]
        ns = 0.0
        for j in range(ds):
            ns += pts[r, j] * pts[r, j]
        ns = math.sqrt(ns)
        c = pts[r, ds]
        if g == REGION_K1:
            c = c - q1
        nu = 0.0
        for j in range(du):
            x = pts[r, ds + 1 + j]
            if g == REGION_K2:
                x = x - q2[j]
            nu += x * x
        nu = math.sqrt(nu)
        if not ns <= bs:
            fail[r] = 0
        elif not abs(c) <= bc:
            fail[r] = 1
        elif not nu <= bu:
            fail[r] = 2
    return pts, kind, region, step, fail


def _bump_scan_loop(lo, w, a, K, resolution):
    n = int(math.floor(w / resolution)) + 1
    changes = 0
    last_sign = 0
    max_deriv = 0.0
    pk = math.pi * K
    for i in range(n + 1):
        y = lo + i * resolution
        if i == n:
            y = lo + w
        u = (y - lo) / w
        if u <= 0.0 or u >= 1.0:
            h = 0.0
            dh = 0.0
        else:
            beta = 16.0 * u * u * (1.0 - u) * (1.0 - u)
            dbeta = 32.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
            sn = math.sin(pk * u)
            h = a * beta * sn
            dh = a / w * (dbeta * sn + beta * pk * math.cos(pk * u))
        if abs(dh) > max_deriv:
            max_deriv = abs(dh)
        if h > 0.0:
            sgn = 1
        elif h < 0.0:
            sgn = -1
        else:
            sgn = 0
        if sgn != 0:
            if last_sign != 0 and sgn != last_sign:
                changes += 1
            last_sign = sgn
    return changes, max_deriv


def bump_values(y, lo, w, a, K):
    """Vectorized ``h(y) = a * beta(u) * sin(pi K u)``, ``u = (y - lo) / w``, zero off support."""
    u = (np.asarray(y, dtype=float) - lo) / w
    inside = (u > 0.0) & (u < 1.0)
    uu = np.where(inside, u, 0.0)
    beta = 16.0 * uu ** 2 * (1.0 - uu) ** 2
    return np.where(inside, a * beta * np.sin(np.pi * K * uu), 0.0)


def bump_derivative(y, lo, w, a, K):
    u = (np.asarray(y, dtype=float) - lo) / w
    inside = (u > 0.0) & (u < 1.0)
    uu = np.where(inside, u, 0.0)
    beta = 16.0 * uu ** 2 * (1.0 - uu) ** 2
    dbeta = 32.0 * uu * (1.0 - uu) * (1.0 - 2.0 * uu)
    pk = np.pi * K
    d = a / w * (dbeta * np.sin(pk * uu) + beta * pk * np.cos(pk * uu))
    return np.where(inside, d, 0.0)


def _bump_scan_numpy(lo, w, a, K, resolution):
    n = int(math.floor(w / resolution)) + 1
    y = lo + np.arange(n + 1) * resolution
    y[-1] = lo + w
    h = bump_values(y, lo, w, a, K)
    s = np.sign(h)
    s = s[s != 0]
    changes = int(np.count_nonzero(s[1:] != s[:-1]))
    max_deriv = float(np.max(np.abs(bump_derivative(y, lo, w, a, K))))
    return changes, max_deriv


trace_py = _trace_impl
bump_scan_py = _bump_scan_numpy

if HAVE_NUMBA:
    trace_jit = njit(nogil=True, cache=False)(_trace_impl)
    bump_scan_jit = njit(nogil=True, cache=False)(_bump_scan_loop)
else:  # pragma: no cover
    trace_jit = trace_py
    bump_scan_jit = bump_scan_py

trace = trace_jit if NUMBA_ENABLED else trace_py
bump_scan = bump_scan_jit if NUMBA_ENABLED else bump_scan_py
