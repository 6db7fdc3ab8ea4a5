"""Exact rational oracle for cycles with one-dimensional blocks.

Everything here is recomputed from the chart data with ``Fraction``
arithmetic, step by step, without touching the package's solver, return-map
or trace code. Floats convert to fractions exactly, so the only rounding in
a comparison is on the package side.
"""
from fractions import Fraction as F


class ExactCycle:
    def __init__(self, cycle):
        assert cycle.index.d_s == 1 and cycle.index.d_u == 1
        f = lambda x: F(float(x))
        self.A1, self.A2 = f(cycle.p1.stable[0, 0]), f(cycle.p2.stable[0, 0])
        self.mu, self.lam = f(cycle.p1.center), f(cycle.p2.center)
        self.M1, self.M2 = f(cycle.p1.unstable[0, 0]), f(cycle.p2.unstable[0, 0])
        self.B1, self.B2 = f(cycle.t1.stable[0, 0]), f(cycle.t2.stable[0, 0])
        self.N1, self.N2 = f(cycle.t1.unstable[0, 0]), f(cycle.t2.unstable[0, 0])
        self.q1 = f(cycle.t1.source_anchor[1])
        self.q1p = f(cycle.t1.target_anchor[0])
        self.q2 = f(cycle.t2.source_anchor[2])
        self.q2p = f(cycle.t2.target_anchor[0])
        self.sig1, self.sig2 = cycle.t1.sigma, cycle.t2.sigma
        r = lambda rr: (f(rr.s), f(rr.c), f(rr.u))
        self.R1, self.R2 = r(cycle.p1.radii), r(cycle.p2.radii)
        self.K1, self.K2 = r(cycle.t1.kappa), r(cycle.t2.kappa)

    # affine maps as ((a_s, b_s), (a_c, b_c), (a_u, b_u))
    def steps(self, loops):
        """Sequence of (kind, map) single steps along the itinerary."""
        out = []
        for m1, m2 in loops:
            out.append(("T1", ((self.B1, self.q1p), (F(1), -self.q1), (self.N1, F(0)))))
            for k in range(m2):
                out.append(("P2", ((self.A2, F(0)), (self.lam, F(0)), (self.M2, F(0)))))
            out.append(("T2", ((self.B2, self.q2p), (F(1), F(0)), (self.N2, -self.N2 * self.q2))))
            for k in range(m1):
                out.append(("P1", ((self.A1, F(0)), (self.mu, F(0)), (self.M1, F(0)))))
        return out

    def fixed_point(self, loops):
        comp = [(F(1), F(0))] * 3
        for _, mp in self.steps(loops):
            comp = [(a * ca, a * cb + b) for (a, b), (ca, cb) in zip(mp, comp)]
        if any(a == 1 for a, _ in comp):
            return None
        return tuple(b / (1 - a) for a, b in comp)

    def orbit(self, loops, p):
        pts = [p]
        for _, mp in self.steps(loops):
            p = tuple(a * x + b for (a, b), x in zip(mp, p))
            pts.append(p)
        return pts

    def realizable(self, loops, p):
        """Closed-polydisc membership of every record, same regions as the tracer."""
        pts = self.orbit(loops, p)
        kinds = [k for k, _ in self.steps(loops)]
        if pts[-1] != p:
            return False
        if not self._inside(p, self.K1, dc=self.q1):
            return False
        i = 0
        for m1, m2 in loops:
            i += 1
            if not self._inside(pts[i], self.R2):
                return False
            for k in range(m2):
                i += 1
                box = self.K2 if k == m2 - 1 else self.R2
                if not self._inside(pts[i], box, du=self.q2 if k == m2 - 1 else 0):
                    return False
            i += 1
            if not self._inside(pts[i], self.R1):
                return False
            for k in range(m1):
                i += 1
                box = self.K1 if k == m1 - 1 else self.R1
                if not self._inside(pts[i], box, dc=self.q1 if k == m1 - 1 else 0):
                    return False
        assert i == len(kinds)
        return True

    @staticmethod
    def _inside(p, box, dc=0, du=0):
        s, c, u = p
        return abs(s) <= box[0] and abs(c - dc) <= box[1] and abs(u - du) <= box[2]

    def period(self, loops):
        return sum(self.sig1 + self.sig2 + m1 + m2 for m1, m2 in loops)


def brute_force_orbits(ex: ExactCycle, n: int, max_loops: int):
    """Realizable periodic orbits of exact period ``n`` by depth-first loop search.

    Orbits are identified by the set of their starting points over all
    rotations, so no canonical form or primitivity rule is borrowed.
    """
    sig = ex.sig1 + ex.sig2
    found = {}

    def dfs(loops, left):
        if left == 0:
            p = ex.fixed_point(loops)
            if p is not None and ex.realizable(loops, p):
                key = frozenset(ex.fixed_point(loops[i:] + loops[:i]) for i in range(len(loops)))
                # exact period n: the orbit visits K1 exactly len(loops) distinct times
                if len(key) == len(loops):
                    found[key] = min(tuple(loops[i:] + loops[:i]) for i in range(len(loops)))
            return
        if len(loops) == max_loops:
            return
        for m1 in range(1, left - sig):
            for m2 in range(1, left - sig - m1 + 1):
                dfs(loops + [(m1, m2)], left - sig - m1 - m2)

    dfs([], n)
    return sorted(found.values())
