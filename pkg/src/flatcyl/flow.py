"""Exact straight-line flow on triangulated translation surfaces.

All predicates are exact cross-product signs, so tracing never rotates the
surface and never leaves the coefficient field.  A trajectory that does not
reach a marked point within its crossing budget is reported as
``Undetermined`` rather than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from math import gcd
from typing import Sequence

from .exactalg import FieldElem, Vec2
from .surface import HalfEdge, Surface, in_sector


@dataclass(frozen=True)
class Undetermined:
    reason: str
    budget: int

    def __bool__(self):
        return False


def direction(v: Vec2) -> Vec2:
    """Canonical representative of the ray through v (positive rescaling only)."""
    v = Vec2(v)
    if v.is_zero():
        raise ValueError("direction must be nonzero")
    x, y = v
    if x.is_rational() and y.is_rational():
        fx = Fraction(int(x.a.numerator), int(x.a.denominator))
        fy = Fraction(int(y.a.numerator), int(y.a.denominator))
        den = fx.denominator * fy.denominator // gcd(fx.denominator, fy.denominator)
        nx, ny = int(fx * den), int(fy * den)
        g = gcd(nx, ny)
        d = x.d
        return Vec2(FieldElem(nx // g, 0, d), FieldElem(ny // g, 0, d))
    lead = x if not x.is_zero() else y
    return v / abs(lead)


@lru_cache(maxsize=1 << 16)
def vertex_positions(tri: tuple[Vec2, Vec2, Vec2]) -> tuple[Vec2, Vec2, Vec2]:
    z = tri[0] - tri[0]
    return (z, tri[0], tri[0] + tri[1])


def _tri_path(s: Surface, t: int, a: int, b: int) -> list[HalfEdge]:
    """Edge path inside triangle t from vertex a to vertex b."""
    if a == b:
        return []
    if b == (a + 1) % 3:
        return [(t, a)]
    return [s.gluing[(t, b)]]


@dataclass
class Trace:
    """A traced trajectory: segments in local triangle coordinates plus combinatorics."""

    segments: list[tuple[int, Vec2, Vec2]]
    exits: list[HalfEdge]
    chain: list[HalfEdge]
    end: tuple  # ("vertex", corner) | ("point", triangle, local point)

    @property
    def hol(self) -> Vec2:
        acc = None
        for _, p, q in self.segments:
            acc = q - p if acc is None else acc + (q - p)
        return acc


def prev_corner(s: Surface, c: HalfEdge) -> HalfEdge:
    u, j = s.gluing[c]
    return (u, (j + 1) % 3)


def corner_containing(s: Surface, v: int, d: Vec2) -> list[HalfEdge]:
    return [c for c in s.vertex_corners(v) if in_sector(*s.corner_sector(c), d)]


def _arrival_corner(s: Surface, corner: HalfEdge, d: Vec2) -> HalfEdge:
    """Corner at the vertex of ``corner`` whose half-open sector holds -d, searched
    starting from ``corner``."""
    c = corner
    nd = -d
    for _ in range(len(s.vertex_corners(s.vertex_of(corner)))):
        if in_sector(*s.corner_sector(c), nd):
            return c
        c = s.next_corner(c)
    raise RuntimeError("arrival direction not found at vertex")


def trace(
    s: Surface,
    corner: HalfEdge,
    d: Vec2,
    max_crossings: int = 1000,
    stop: FieldElem | None = None,
) -> Trace | Undetermined:
    """Follow the ray in direction d leaving the vertex at ``corner``.

    d must lie in the corner's half-open sector.  With ``stop`` the ray is cut
    at displacement ``stop * d`` if no vertex is hit before that.
    """
    t, i = corner
    tri = s.triangles[t]
    if not in_sector(tri[i], -tri[(i - 1) % 3], d):
        raise ValueError(f"direction {d} not in sector of corner {corner}")
    nd2 = d.norm2()
    P = vertex_positions(tri)
    segs: list[tuple[int, Vec2, Vec2]] = []
    exits: list[HalfEdge] = []
    chain: list[HalfEdge] = []
    mu = tri[0][0] * 0

    def stop_in(t, p, q, mu):
        if stop is None:
            return None
        dm = (q - p).dot(d) / nd2
        if stop <= mu + dm:
            return p + d * (stop - mu)
        return None

    if tri[i].cross(d).is_zero():
        q = P[(i + 1) % 3]
        cut = stop_in(t, P[i], q, mu)
        if cut is not None and cut != q:
            return Trace([(t, P[i], cut)], [], [], ("point", t, cut))
        return Trace([(t, P[i], q)], [], [(t, i)], ("vertex", _arrival_corner(s, ((t, (i + 1) % 3)), d)))
    # leave through the opposite edge
    p = P[i]
    cur_v = i
    k = (i + 1) % 3
    crossings = 0
    while True:
        a, b = P[k], P[(k + 1) % 3]
        sigma = (p - a).cross(d) / (b - a).cross(d)
        q = a + (b - a) * sigma
        cut = stop_in(t, p, q, mu)
        if cut is not None:
            segs.append((t, p, cut))
            return Trace(segs, exits, chain, ("point", t, cut))
        segs.append((t, p, q))
        mu = mu + (q - p).dot(d) / nd2
        chain.extend(_tri_path(s, t, cur_v, k))
        exits.append((t, k))
        crossings += 1
        if crossings > max_crossings:
            return Undetermined("crossing budget exhausted", max_crossings)
        u, j = s.gluing[(t, k)]
        t = u
        tri = s.triangles[t]
        P = vertex_positions(tri)
        cur_v = (j + 1) % 3
        p = P[j] + tri[j] * (1 - sigma)
        C = P[(j + 2) % 3]
        c = d.cross(C - p)
        if c.is_zero():
            cut = stop_in(t, p, C, mu)
            if cut is not None and cut != C:
                segs.append((t, p, cut))
                return Trace(segs, exits, chain, ("point", t, cut))
            segs.append((t, p, C))
            chain.extend(_tri_path(s, t, cur_v, (j + 2) % 3))
            return Trace(segs, exits, chain, ("vertex", _arrival_corner(s, (t, (j + 2) % 3), d)))
        k = (j + 1) % 3 if c.sign() > 0 else (j + 2) % 3


def trace_closed(s: Surface, t: int, j: int, p: Vec2, d: Vec2, max_crossings: int = 10000):
    """Follow the trajectory entering triangle t through edge j at local point p
    until it returns; returns (exits, chain, hol) or Undetermined."""
    start = (t, j, p)
    P = vertex_positions(s.triangles[t])
    cur_v = (j + 1) % 3
    exits, chain = [], []
    hol = d * 0
    for _ in range(max_crossings):
        C = P[(j + 2) % 3]
        c = d.cross(C - p)
        if c.is_zero():
            raise RuntimeError("closed trajectory hit a marked point")
        k = (j + 1) % 3 if c.sign() > 0 else (j + 2) % 3
        a, b = P[k], P[(k + 1) % 3]
        sigma = (p - a).cross(d) / (b - a).cross(d)
        q = a + (b - a) * sigma
        hol = hol + (q - p)
        chain.extend(_tri_path(s, t, cur_v, k))
        exits.append((t, k))
        u, j = s.gluing[(t, k)]
        t = u
        tri = s.triangles[t]
        P = vertex_positions(tri)
        cur_v = (j + 1) % 3
        p = P[j] + tri[j] * (1 - sigma)
        if (t, j, p) == start:
            return exits, chain, hol
    return Undetermined("closed trajectory budget exhausted", max_crossings)


@dataclass
class SaddleConnection:
    hol: Vec2
    start_corner: HalfEdge
    end_corner: HalfEdge
    start_vertex: int
    end_vertex: int
    segments: list[tuple[int, Vec2, Vec2]]
    exits: list[HalfEdge]
    chain: list[HalfEdge]
    lam: FieldElem | None = None  # hol = lam * direction, when parallel

    def to_json(self) -> dict:
        return {
            "hol": [str(self.hol[0]), str(self.hol[1])],
            "start": self.start_vertex,
            "end": self.end_vertex,
            "crossings": [list(h) for h in self.exits],
        }


def trace_separatrix(s: Surface, corner: HalfEdge, d: Vec2, max_crossings: int = 1000):
    tr = trace(s, corner, d, max_crossings)
    if isinstance(tr, Undetermined):
        return tr
    end = tr.end[1]
    hol = tr.hol
    lam = hol.dot(d) / d.norm2()
    return SaddleConnection(
        hol, corner, end, s.vertex_of(corner), s.vertex_of(end), tr.segments, tr.exits, tr.chain, lam
    )


def _level(d: Vec2, p: Vec2) -> FieldElem:
    return d.cross(p)


def _area_below(P, levels, area, ell):
    """Area of the part of a triangle with level <= ell."""
    L0, L1, L2 = sorted(levels)
    if ell <= L0:
        return area * 0
    if ell >= L2:
        return area
    if ell <= L1:
        return area * (ell - L0) * (ell - L0) / ((L1 - L0) * (L2 - L0))
    return area - area * (L2 - ell) * (L2 - ell) / ((L2 - L0) * (L2 - L1))


@dataclass
class Strip:
    t: int
    lo: FieldElem
    hi: FieldElem
    entry: int
    exit: int
    area: FieldElem


@dataclass
class Cylinder:
    index: int
    direction: Vec2
    lam: FieldElem  # core holonomy = lam * direction
    thickness: FieldElem  # transverse level width = height * |direction|
    area: FieldElem
    strips: list[int]
    bottom: list[int]  # saddle connection indices, in flow order
    top: list[int]
    core_exits: list[HalfEdge] = field(default_factory=list)
    core_chain: list[HalfEdge] = field(default_factory=list)
    twist: FieldElem | None = None  # position above bottom[0].start along the top, in units of direction
    cross: SaddleConnection | None = None

    @property
    def core(self) -> Vec2:
        return self.direction * self.lam

    @property
    def modulus(self) -> FieldElem:
        return self.thickness / (self.lam * self.direction.norm2())

    @property
    def circumference2(self) -> FieldElem:
        return self.lam * self.lam * self.direction.norm2()

    @property
    def height2(self) -> FieldElem:
        return self.thickness * self.thickness / self.direction.norm2()

    @property
    def circumference(self) -> FieldElem | None:
        return self.circumference2.sqrt()

    @property
    def height(self) -> FieldElem | None:
        return self.height2.sqrt()

    @property
    def period(self) -> FieldElem:
        """c / h, the shear time of a full Dehn twist."""
        return self.lam * self.direction.norm2() / self.thickness

    @property
    def twist_hol(self) -> Vec2:
        """e^{i theta} h as a vector: the twist cocycle is t * this * I(core)."""
        return self.direction * (self.thickness / self.direction.norm2())

    def to_json(self, homology=None) -> dict:
        out = {
            "index": self.index,
            "core_hol": [str(self.core[0]), str(self.core[1])],
            "modulus": str(self.modulus),
            "area": str(self.area),
            "circumference": None if self.circumference is None else str(self.circumference),
            "height": None if self.height is None else str(self.height),
            "circumference_squared": str(self.circumference2),
            "height_squared": str(self.height2),
            "bottom": self.bottom,
            "top": self.top,
        }
        if homology is not None:
            out["core_class"] = homology.chain(self.core_chain)
        return out


@dataclass
class Decomposition:
    surface: Surface
    direction: Vec2
    status: str  # "periodic" | "undetermined"
    cylinders: list[Cylinder]
    saddle_connections: list[SaddleConnection]
    strips: list[Strip] = field(default_factory=list)
    reason: str = ""

    @property
    def periodic(self) -> bool:
        return self.status == "periodic"

    def to_json(self, homology=None) -> dict:
        return {
            "direction": [str(self.direction[0]), str(self.direction[1])],
            "status": self.status,
            "reason": self.reason,
            "cylinders": [c.to_json(homology) for c in self.cylinders],
            "saddle_connections": [sc.to_json() for sc in self.saddle_connections],
        }


class _DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b)] = min(a, b)


def decompose(s: Surface, d: Vec2, max_crossings: int = 1000) -> Decomposition:
    d = Vec2(d)
    if d[0].d != s.d:
        d = Vec2(s.elem(d[0]), s.elem(d[1]))
    scs: list[SaddleConnection] = []
    for v in range(s.num_vertices):
        for c in corner_containing(s, v, d):
            sc = trace_separatrix(s, c, d, max_crossings)
            if isinstance(sc, Undetermined):
                return Decomposition(s, d, "undetermined", [], scs, reason=f"separatrix from corner {c}: {sc.reason}")
            scs.append(sc)

    # strips between consecutive cut levels of every triangle
    seg_levels: dict[int, set] = {}
    for sc in scs:
        for t, p, _ in sc.segments:
            seg_levels.setdefault(t, set()).add(_level(d, p))
    strips: list[Strip] = []
    by_tri: dict[int, list[int]] = {}
    for t, tri in enumerate(s.triangles):
        P = vertex_positions(tri)
        lv = [_level(d, p) for p in P]
        area = tri[0].cross(tri[1]) / 2
        cuts = sorted(set(lv) | seg_levels.get(t, set()))
        for lo, hi in zip(cuts, cuts[1:]):
            entry = ex = None
            for k in range(3):
                a, b = lv[k], lv[(k + 1) % 3]
                if min(a, b) <= lo and hi <= max(a, b) and a != b:
                    if tri[k].cross(d).sign() < 0:
                        ex = k
                    else:
                        entry = k
            area_s = _area_below(P, lv, area, hi) - _area_below(P, lv, area, lo)
            by_tri.setdefault(t, []).append(len(strips))
            strips.append(Strip(t, lo, hi, entry, ex, area_s))
    dsu = _DSU(len(strips))
    for n, st in enumerate(strips):
        t, k = st.t, st.exit
        u, j = s.gluing[(t, k)]
        Pt = vertex_positions(s.triangles[t])
        Pu = vertex_positions(s.triangles[u])
        delta = _level(d, Pu[(j + 1) % 3] - Pt[k])
        lo, hi = st.lo + delta, st.hi + delta
        for m in by_tri[u]:
            o = strips[m]
            if max(lo, o.lo) < min(hi, o.hi):
                dsu.union(n, m)

    def strip_at(t, lo=None, hi=None):
        for m in by_tri[t]:
            if (lo is not None and strips[m].lo == lo) or (hi is not None and strips[m].hi == hi):
                return m
        raise RuntimeError("no strip adjacent to saddle connection")

    above: list[int] = []
    below: list[int] = []
    for sc in scs:
        t, p, q = sc.segments[0]
        ell = _level(d, p)
        if not sc.exits and len(sc.segments) == 1 and sc.start_corner[0] == t and (q - p).cross(d).is_zero() and sc.chain == [sc.start_corner]:
            # runs along edge (t, i): triangle t lies to its left
            u, j = s.gluing[sc.start_corner]
            Pu = vertex_positions(s.triangles[u])
            above.append(dsu.find(strip_at(t, lo=ell)))
            below.append(dsu.find(strip_at(u, hi=_level(d, Pu[j]))))
        else:
            above.append(dsu.find(strip_at(t, lo=ell)))
            below.append(dsu.find(strip_at(t, hi=ell)))

    start_of = {sc.start_corner: n for n, sc in enumerate(scs)}

    def successor(n, clockwise):
        c = scs[n].end_corner
        for _ in range(4 * s.num_triangles):
            c = prev_corner(s, c) if clockwise else s.next_corner(c)
            if c in start_of:
                return start_of[c]
        raise RuntimeError("no outgoing saddle connection at vertex")

    roots = sorted({dsu.find(n) for n in range(len(strips))})
    cyls: list[Cylinder] = []
    order = sorted(roots, key=lambda r: min(n for n in range(len(scs)) if above[n] == r) if r in above else len(scs))
    for r in order:
        members = [n for n in range(len(strips)) if dsu.find(n) == r]
        area = sum((strips[n].area for n in members[1:]), strips[members[0]].area)
        bset = [n for n in range(len(scs)) if above[n] == r]
        tset = [n for n in range(len(scs)) if below[n] == r]
        if not bset or not tset:
            raise RuntimeError("cylinder without boundary")
        bottom = _cycle(min(bset), lambda n: successor(n, True))
        top = _cycle(min(tset), lambda n: successor(n, False))
        if sorted(bottom) != sorted(bset) or sorted(top) != sorted(tset):
            raise RuntimeError("boundary of cylinder is not a single cycle")
        lam = sum((scs[n].lam for n in bottom[1:]), scs[bottom[0]].lam)
        lam_top = sum((scs[n].lam for n in top[1:]), scs[top[0]].lam)
        if lam != lam_top:
            raise RuntimeError("top and bottom circumferences differ")
        cyl = Cylinder(len(cyls), d, lam, area / lam, area, members, bottom, top)
        cyl.core_chain = [h for n in bottom for h in scs[n].chain]
        st = strips[members[0]]
        _fill_core(s, cyl, st, d, max_crossings)
        _fill_twist(s, cyl, scs, d, max_crossings)
        cyls.append(cyl)
    # canonical order: increasing circumference, then modulus
    cyls.sort(key=lambda c: (c.lam, c.modulus))
    for k, c in enumerate(cyls):
        c.index = k
    total = sum((c.area for c in cyls), s.zero())
    if total != s.area():
        raise RuntimeError("cylinder areas do not add up to the surface area")
    return Decomposition(s, d, "periodic", cyls, scs, strips)


def _cycle(start, nxt):
    out = [start]
    x = nxt(start)
    while x != start:
        if x in out or len(out) > 10**6:
            raise RuntimeError("boundary successor map is not a cycle")
        out.append(x)
        x = nxt(x)
    return out


def _fill_core(s, cyl: Cylinder, st: Strip, d: Vec2, budget: int) -> None:
    t = st.t
    tri = s.triangles[t]
    P = vertex_positions(tri)
    mid = (st.lo + st.hi) / 2
    j = st.entry
    a, b = P[j], P[(j + 1) % 3]
    # point on edge j at level mid
    sigma = (mid - _level(d, a)) / (_level(d, b) - _level(d, a))
    p = a + (b - a) * sigma
    res = trace_closed(s, t, j, p, d, max(budget, 4 * s.num_triangles * max(1, len(cyl.strips))))
    if isinstance(res, Undetermined):
        raise RuntimeError("core trajectory did not close")
    exits, _chain, hol = res
    if hol != cyl.core:
        raise RuntimeError("core holonomy mismatch")
    cyl.core_exits = exits


def _fill_twist(s, cyl: Cylinder, scs: list[SaddleConnection], d: Vec2, budget: int) -> None:
    """Locate the top point straight above bottom[0].start and the cross saddle connection."""
    n2 = d.norm2()
    up = d.rot90()
    b0 = scs[cyl.bottom[0]]
    c = b0.start_corner
    for _ in range(4 * s.num_triangles):
        if in_sector(*s.corner_sector(c), up):
            break
        c = s.next_corner(c)
    reach = cyl.thickness / n2
    # both traces stay inside the cylinder, crossing each strip a bounded number of times
    inner = max(budget, 4 * s.num_triangles * max(1, len(cyl.strips)))
    tr = trace(s, c, up, inner, stop=reach)
    if isinstance(tr, Undetermined):
        raise RuntimeError("perpendicular trace failed")
    # position along the top boundary
    offsets = {}
    acc = cyl.lam * 0
    for n in cyl.top:
        offsets[n] = acc
        acc = acc + scs[n].lam
    tau = None
    if tr.end[0] == "vertex":
        c2 = tr.end[1]
        top_starts = {scs[n].start_corner: n for n in cyl.top}
        for _ in range(4 * s.num_triangles):
            if c2 in top_starts:
                tau = offsets[top_starts[c2]]
                break
            c2 = s.next_corner(c2)
    else:
        _, t, p = tr.end
        for n in cyl.top:
            sc = scs[n]
            run = sc.lam * 0
            for ts, a, b in sc.segments:
                if ts == t and d.cross(p - a).is_zero() and (p - a).dot(d).sign() >= 0 and (b - p).dot(d).sign() >= 0:
                    tau = offsets[n] + run + (p - a).dot(d) / n2
                    break
                run = run + (b - a).dot(d) / n2
            if tau is not None:
                break
            # edge saddle connections also bound the neighbor triangle
            if len(sc.segments) == 1 and not sc.exits:
                u, j = s.gluing[sc.start_corner]
                Pu = vertex_positions(s.triangles[u])
                a2, b2 = Pu[(j + 1) % 3], Pu[j]
                if u == t and d.cross(p - a2).is_zero() and (p - a2).dot(d).sign() >= 0 and (b2 - p).dot(d).sign() >= 0:
                    tau = offsets[n] + (p - a2).dot(d) / n2
                    break
    if tau is None:
        raise RuntimeError("could not locate the top point above the bottom start")
    while tau.sign() < 0:
        tau = tau + cyl.lam
    while tau >= cyl.lam:
        tau = tau - cyl.lam
    cyl.twist = tau
    # cross saddle connection from bottom[0].start to top[0].start
    kappa = up * reach - d * tau
    c = b0.start_corner
    for _ in range(4 * s.num_triangles):
        if in_sector(*s.corner_sector(c), kappa):
            break
        c = s.next_corner(c)
    tr2 = trace_separatrix(s, c, kappa, inner)
    if isinstance(tr2, Undetermined) or tr2.hol != kappa:
        raise RuntimeError("cross saddle connection did not close up as expected")
    cyl.cross = tr2


def shortest_saddle_connections(s: Surface, bound) -> list[SaddleConnection]:
    """Every saddle connection of length <= bound, by developing triangles from each corner."""
    bound = s.elem(bound) if not isinstance(bound, FieldElem) else bound
    if bound.sign() <= 0:
        return []
    b2 = bound * bound
    out: list[SaddleConnection] = []
    for t0 in range(s.num_triangles):
        for i in range(3):
            corner = (t0, i)
            tri = s.triangles[t0]
            R = tri[i]
            L = -tri[(i - 1) % 3]
            if R.norm2() <= b2:
                out.append(_found(s, corner, R, (t0, (i + 1) % 3)))
            Pr, Pl = R, L
            u, j = s.gluing[(t0, (i + 1) % 3)]
            stack = [(u, j, Pr, Pl, R, L)]
            while stack:
                u, j, Pr, Pl, R, L = stack.pop()
                if _seg_dist2(Pr, Pl) > b2:
                    continue
                X = Pr + s.triangles[u][(j + 1) % 3]
                inside = R.cross(X).sign() > 0 and X.cross(L).sign() > 0
                if inside and X.norm2() <= b2:
                    out.append(_found(s, corner, X, (u, (j + 2) % 3)))
                # edge j+1: Pr -> X ; edge j+2: X -> Pl
                for k, (A, B) in (((j + 1) % 3, (Pr, X)), ((j + 2) % 3, (X, Pl))):
                    nr = A if R.cross(A).sign() > 0 else R
                    nl = B if B.cross(L).sign() > 0 else L
                    if nr.cross(nl).sign() <= 0:
                        continue
                    w, m = s.gluing[(u, k)]
                    stack.append((w, m, A, B, nr, nl))
    return out


def _seg_dist2(a: Vec2, b: Vec2) -> FieldElem:
    ab = b - a
    s_ = -(a.dot(ab)) / ab.norm2()
    if s_.sign() < 0:
        s_ = s_ * 0
    elif s_ > 1:
        s_ = s_ * 0 + 1
    p = a + ab * s_
    return p.norm2()


def _found(s: Surface, corner: HalfEdge, hol: Vec2, end_vertex_corner: HalfEdge) -> SaddleConnection:
    return SaddleConnection(
        hol, corner, end_vertex_corner, s.vertex_of(corner), s.vertex_of(end_vertex_corner), [], [], []
    )
