"""Translation surfaces as triangulations with exact edge holonomies.

Triangle ``t`` has edges ``0, 1, 2``; edge ``i`` runs from vertex ``i`` to
vertex ``i + 1`` and the three holonomies sum to zero.  A half-edge is the
pair ``(t, i)``.  The gluing pairs every half-edge with a half-edge of
opposite holonomy.  Every vertex of the triangulation is a marked point.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exactalg import FieldElem, FieldMismatch, Vec2, is_squarefree, parse_elem

HalfEdge = tuple[int, int]


class SurfaceError(ValueError):
    """Invalid surface data; ``code`` is a machine-readable tag."""

    def __init__(self, code: str, message: str, obj=None):
        super().__init__(message)
        self.code = code
        self.obj = obj


def in_sector(a: Vec2, b: Vec2, u: Vec2) -> bool:
    """Is u in the half-open angular sector [a, b), for a sector of angle < pi?"""
    ca = a.cross(u)
    if ca.is_zero():
        return a.dot(u).sign() > 0
    return ca.sign() > 0 and u.cross(b).sign() > 0


@dataclass(frozen=True)
class StratumSignature:
    kappa: tuple[int, ...]
    genus: int
    marked: int

    def to_json(self) -> dict:
        return {"kappa": list(self.kappa), "genus": self.genus}


class GL2:
    """2x2 matrix with positive determinant over the field."""

    def __init__(self, a, b, c, d):
        self.m = (a, b, c, d)
        det = a * d - b * c
        if not isinstance(det, FieldElem):
            det = FieldElem(det)
        if det.sign() <= 0:
            raise SurfaceError("bad_matrix", "matrix must have positive determinant", self.m)
        self.det = det

    @classmethod
    def identity(cls) -> GL2:
        return cls(1, 0, 0, 1)

    @classmethod
    def u(cls, t) -> GL2:
        """Horocycle matrix ((1, t), (0, 1))."""
        return cls(1, t, 0, 1)

    @classmethod
    def diag(cls, a, b) -> GL2:
        """Diagonal matrix; g_t in the field-valued case, or the renormalization (1, 0; 0, a)."""
        return cls(a, 0, 0, b)

    def apply(self, v: Vec2) -> Vec2:
        a, b, c, d = self.m
        return Vec2(v[0] * a + v[1] * b, v[0] * c + v[1] * d)

    def __matmul__(self, other: GL2) -> GL2:
        a, b, c, d = self.m
        e, f, g, h = other.m
        return GL2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


class Surface:
    """Immutable, possibly multicomponent, labeled translation surface."""

    __slots__ = (
        "d",
        "triangles",
        "gluing",
        "labels",
        "tri_component",
        "_vertex_cache",
        "_hash",
    )

    def __init__(
        self,
        triangles: Sequence[Sequence[Vec2]],
        gluing: dict[HalfEdge, HalfEdge],
        labels: Sequence[str] | None = None,
        d: int = 1,
        validate: bool = True,
    ):
        self.d = d
        self.triangles = tuple(tuple(Vec2(e) for e in t) for t in triangles)
        self.gluing = dict(gluing)
        comp = _components(len(self.triangles), self.gluing)
        ncomp = max(comp) + 1 if comp else 0
        if labels is None:
            labels = [str(i) for i in range(ncomp)]
        if len(labels) != ncomp:
            raise SurfaceError("bad_labels", f"{len(labels)} labels for {ncomp} components")
        if len(set(labels)) != len(labels):
            raise SurfaceError("bad_labels", "component labels must be distinct")
        self.labels = tuple(labels)
        self.tri_component = tuple(comp)
        self._vertex_cache = None
        self._hash = None
        if validate:
            self.validate()

    # -- basic structure ----------------------------------------------------
    def validate(self) -> None:
        if not self.triangles:
            raise SurfaceError("empty", "surface has no triangles")
        for t, tri in enumerate(self.triangles):
            if len(tri) != 3:
                raise SurfaceError("bad_triangle", f"triangle {t} does not have 3 edges", t)
            for e in tri:
                for c in e:
                    if c.d != self.d and not c.is_rational():
                        raise FieldMismatch(f"triangle {t} lives in another field")
            s = tri[0] + tri[1] + tri[2]
            if not s.is_zero():
                raise SurfaceError("not_closed", f"triangle {t} edges do not close", t)
            if tri[0].cross(tri[1]).sign() <= 0:
                raise SurfaceError("negative_area", f"triangle {t} is not positively oriented", t)
        for t in range(len(self.triangles)):
            for i in range(3):
                h = (t, i)
                if h not in self.gluing:
                    raise SurfaceError("unglued", f"half-edge {h} is not glued", h)
                o = self.gluing[h]
                if self.gluing.get(o) != h or o == h:
                    raise SurfaceError("bad_gluing", f"gluing is not an involution at {h}", h)
                if not (self.hol(h) + self.hol(o)).is_zero():
                    raise SurfaceError("gluing_mismatch", f"glued edges {h}, {o} differ", (h, o))

    def hol(self, h: HalfEdge) -> Vec2:
        return self.triangles[h[0]][h[1]]

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def half_edges(self) -> Iterable[HalfEdge]:
        for t in range(len(self.triangles)):
            for i in range(3):
                yield (t, i)

    def edges(self) -> list[HalfEdge]:
        """Canonical representative (smaller half-edge) of each undirected edge."""
        return [h for h in self.half_edges() if h < self.gluing[h]]

    def zero(self) -> FieldElem:
        return FieldElem(0, 0, self.d)

    def elem(self, x) -> FieldElem:
        return parse_elem(x, self.d) if not isinstance(x, FieldElem) else x.in_field(self.d) if x.d != self.d else x

    # -- vertices -------------------------------------------------------------
    def next_corner(self, corner: HalfEdge) -> HalfEdge:
        """The corner counterclockwise after ``corner`` around the same vertex."""
        t, i = corner
        return self.gluing[(t, (i - 1) % 3)]

    def _vertices(self):
        if self._vertex_cache is None:
            vid: dict[HalfEdge, int] = {}
            cycles: list[list[HalfEdge]] = []
            for c in self.half_edges():
                if c in vid:
                    continue
                cyc = []
                x = c
                while x not in vid:
                    vid[x] = len(cycles)
                    cyc.append(x)
                    x = self.next_corner(x)
                cycles.append(cyc)
            self._vertex_cache = (vid, cycles)
        return self._vertex_cache

    def vertex_of(self, corner: HalfEdge) -> int:
        return self._vertices()[0][corner]

    def vertex_corners(self, v: int) -> list[HalfEdge]:
        """Corners around vertex v in counterclockwise order."""
        return self._vertices()[1][v]

    @property
    def num_vertices(self) -> int:
        return len(self._vertices()[1])

    def corner_sector(self, corner: HalfEdge) -> tuple[Vec2, Vec2]:
        t, i = corner
        tri = self.triangles[t]
        return tri[i], -tri[(i - 1) % 3]

    def cone_multiple(self, v: int) -> int:
        """Cone angle at v divided by 2*pi."""
        ref = Vec2(FieldElem(1, 0, self.d), self.zero())
        n = sum(1 for c in self.vertex_corners(v) if in_sector(*self.corner_sector(c), ref))
        if n < 1:
            raise SurfaceError("bad_cone_angle", f"cone angle at vertex {v} is not a multiple of 2pi", v)
        return n

    def vertex_component(self, v: int) -> int:
        return self.tri_component[self.vertex_corners(v)[0][0]]

    def signature(self) -> list[StratumSignature]:
        out = []
        ncomp = len(self.labels)
        for k in range(ncomp):
            verts = [v for v in range(self.num_vertices) if self.vertex_component(v) == k]
            nf = sum(1 for c in self.tri_component if c == k)
            ne = 3 * nf // 2
            chi = len(verts) - ne + nf
            g = (2 - chi) // 2
            kappa = tuple(sorted((self.cone_multiple(v) - 1 for v in verts), reverse=True))
            if sum(kappa) != 2 * g - 2:
                raise SurfaceError("bad_cone_angle", "zero orders do not sum to 2g-2", k)
            out.append(StratumSignature(kappa, g, len(verts)))
        return out

    # -- geometry -------------------------------------------------------------
    def area(self) -> FieldElem:
        total = self.zero()
        for tri in self.triangles:
            total = total + tri[0].cross(tri[1])
        return total / 2

    def component_area(self, k: int) -> FieldElem:
        total = self.zero()
        for t, tri in enumerate(self.triangles):
            if self.tri_component[t] == k:
                total = total + tri[0].cross(tri[1])
        return total / 2

    def apply_gl2(self, m: GL2) -> Surface:
        tris = [[m.apply(e) for e in tri] for tri in self.triangles]
        return Surface(tris, self.gluing, self.labels, self.d)

    def project_component(self, label: str) -> Surface:
        if label not in self.labels:
            raise SurfaceError("unknown_label", f"no component labeled {label!r}", label)
        k = self.labels.index(label)
        keep = [t for t in range(self.num_triangles) if self.tri_component[t] == k]
        new = {t: n for n, t in enumerate(keep)}
        glue = {(new[t], i): (new[u], j) for (t, i), (u, j) in self.gluing.items() if t in new}
        return Surface([self.triangles[t] for t in keep], glue, [label], self.d)

    def relabel(self, labels: Sequence[str]) -> Surface:
        return Surface(self.triangles, self.gluing, labels, self.d, validate=False)

    # -- identity -------------------------------------------------------------
    def key(self):
        return (
            self.d,
            self.labels,
            tuple(tuple((e[0].a, e[0].b, e[1].a, e[1].b) for e in tri) for tri in self.triangles),
            tuple(sorted(self.gluing.items())),
        )

    def __eq__(self, other):
        return isinstance(other, Surface) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:16]

    def __repr__(self):
        return f"Surface({self.num_triangles} triangles, components={list(self.labels)}, d={self.d})"

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        comps = []
        for k, label in enumerate(self.labels):
            tris = [t for t in range(self.num_triangles) if self.tri_component[t] == k]
            local = {t: n for n, t in enumerate(tris)}
            polys = []
            for t in tris:
                e0, e1, _ = self.triangles[t]
                z = Vec2(self.zero(), self.zero())
                pts = [z, e0, e0 + e1]
                polys.append({"vertices": [[str(p[0]), str(p[1])] for p in pts]})
            glue = []
            for (t, i), (u, j) in sorted(self.gluing.items()):
                if self.tri_component[t] == k and (t, i) < (u, j):
                    glue.append([[local[t], i], [local[u], j]])
            comps.append({"label": label, "polygons": polys, "gluings": glue, "marked": []})
        kind = "rational" if self.d == 1 else "quadratic"
        return {"field": {"kind": kind, "d": self.d}, "components": comps}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict) -> Surface:
        return build_from_json(data)


def _components(n: int, gluing: dict[HalfEdge, HalfEdge]) -> list[int]:
    comp = [-1] * n
    k = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        stack = [s]
        comp[s] = k
        while stack:
            t = stack.pop()
            for i in range(3):
                o = gluing.get((t, i))
                if o is not None and comp[o[0]] < 0:
                    comp[o[0]] = k
                    stack.append(o[0])
        k += 1
    return comp


# ---------------------------------------------------------------------------
# construction from polygons


def _ear_clip(pts: list[Vec2]):
    """Triangulate a simple counterclockwise polygon.

    Returns (triangles as vertex-index triples, edge map) where the edge map
    sends polygon edge k to (triangle, side).
    """
    n = len(pts)
    rem = list(range(n))
    # edge ref for the boundary segment rem[k] -> rem[k+1]
    ref: dict[tuple[int, int], tuple] = {(k, (k + 1) % n): ("poly", k) for k in range(n)}
    tris: list[tuple[int, int, int]] = []
    links: list[tuple[tuple, HalfEdge]] = []
    while len(rem) > 3:
        m = len(rem)
        for pos in range(m):
            a, b, c = rem[pos - 1], rem[pos], rem[(pos + 1) % m]
            if (pts[b] - pts[a]).cross(pts[c] - pts[b]).sign() <= 0:
                continue
            if any(_in_closed_triangle(pts[a], pts[b], pts[c], pts[x]) for x in rem if x not in (a, b, c)):
                continue
            t = len(tris)
            tris.append((a, b, c))
            links.append((ref.pop((a, b)), (t, 0)))
            links.append((ref.pop((b, c)), (t, 1)))
            ref[(a, c)] = ("tri", t, 2)
            rem.pop(pos)
            break
        else:
            raise SurfaceError("not_simple", "polygon could not be triangulated (not simple?)")
    a, b, c = rem
    if (pts[b] - pts[a]).cross(pts[c] - pts[b]).sign() <= 0:
        raise SurfaceError("not_simple", "degenerate final ear")
    t = len(tris)
    tris.append((a, b, c))
    for (u, w), side in (((a, b), 0), ((b, c), 1), ((c, a), 2)):
        links.append((ref.pop((u, w)), (t, side)))
    edge_map: dict[int, HalfEdge] = {}
    inner: list[tuple[HalfEdge, HalfEdge]] = []
    for r, h in links:
        if r[0] == "poly":
            edge_map[r[1]] = h
        else:
            inner.append(((r[1], r[2]), h))
    return tris, edge_map, inner


def _in_closed_triangle(a: Vec2, b: Vec2, c: Vec2, p: Vec2) -> bool:
    return (b - a).cross(p - a).sign() >= 0 and (c - b).cross(p - b).sign() >= 0 and (a - c).cross(p - c).sign() >= 0


def build(components: Sequence[dict], d: int = 1) -> tuple[Surface, dict]:
    """Build a surface from polygon components.

    Each component is ``{"label", "polygons": [[Vec2 vertex, ...], ...],
    "gluings": [((p, e), (q, f)), ...], "marked": [(p, v), ...]}``.  Polygon
    edge ``e`` runs from vertex ``e`` to vertex ``e + 1``.  Returns the surface
    and a map ``(component, polygon, edge) -> half-edge``.
    """
    if d != 1 and not is_squarefree(d):
        raise SurfaceError("bad_field", f"d={d} is not square-free")
    triangles: list[list[Vec2]] = []
    gluing: dict[HalfEdge, HalfEdge] = {}
    labels = []
    where: dict[tuple[int, int, int], HalfEdge] = {}
    for ci, comp in enumerate(components):
        labels.append(comp.get("label", str(ci)))
        polys = comp["polygons"]
        for pi, pts in enumerate(polys):
            pts = [Vec2(p) for p in pts]
            if len(pts) < 3:
                raise SurfaceError("not_simple", f"polygon {pi} has fewer than 3 vertices", pi)
            area2 = sum(((pts[k].cross(pts[(k + 1) % len(pts)])) for k in range(len(pts))), FieldElem(0, 0, d))
            if area2.sign() <= 0:
                raise SurfaceError("negative_area", f"polygon {pi} is not counterclockwise", pi)
            tris, emap, inner = _ear_clip(pts)
            base = len(triangles)
            for a, b, c in tris:
                triangles.append([pts[b] - pts[a], pts[c] - pts[b], pts[a] - pts[c]])
            for (t1, s1), (t2, s2) in inner:
                gluing[(base + t1, s1)] = (base + t2, s2)
                gluing[(base + t2, s2)] = (base + t1, s1)
            for k, (t, s) in emap.items():
                where[(ci, pi, k)] = (base + t, s)
        seen = set()
        for pair in comp["gluings"]:
            (p, e), (q, f) = pair
            for x in ((ci, p, e), (ci, q, f)):
                if x not in where:
                    raise SurfaceError("gluing_mismatch", f"no polygon edge {x[1:]}", x[1:])
                if x in seen:
                    raise SurfaceError("gluing_mismatch", f"polygon edge {x[1:]} glued twice", x[1:])
                seen.add(x)
            h1, h2 = where[(ci, p, e)], where[(ci, q, f)]
            v1, v2 = triangles[h1[0]][h1[1]], triangles[h2[0]][h2[1]]
            if not (v1 + v2).is_zero():
                raise SurfaceError("gluing_mismatch", f"edges {(p, e)} and {(q, f)} are not opposite", ((p, e), (q, f)))
            gluing[h1] = h2
            gluing[h2] = h1
        for pi, pts in enumerate(polys):
            for k in range(len(pts)):
                if (ci, pi, k) not in seen:
                    raise SurfaceError("unglued", f"polygon edge {(pi, k)} is not glued", (pi, k))
        for p, v in comp.get("marked", []):
            if not (0 <= p < len(polys) and 0 <= v < len(polys[p])):
                raise SurfaceError("bad_marked", f"marked point {(p, v)} is not a polygon vertex", (p, v))
    surf = Surface(triangles, gluing, None, d)
    # components may have been split or merged by the gluing; relabel by first triangle
    order = []
    for ci, comp in enumerate(components):
        first = where.get((ci, 0, 0))
        if first is not None:
            order.append((surf.tri_component[first[0]], comp.get("label", str(ci))))
    if len({k for k, _ in order}) != len(surf.labels) or len(order) != len(surf.labels):
        raise SurfaceError("disconnected", "each component must be connected")
    lab = [None] * len(surf.labels)
    for k, name in order:
        lab[k] = name
    surf = surf.relabel(lab)
    surf.signature()  # checks cone angles
    return surf, where


def build_from_json(data: dict) -> Surface:
    field = data.get("field", {"kind": "rational", "d": 1})
    d = int(field.get("d", 1)) if field.get("kind", "rational") == "quadratic" else 1
    comps = []
    for comp in data["components"]:
        polys = []
        for poly in comp["polygons"]:
            if "vertices" in poly:
                polys.append([Vec2(parse_elem(x, d), parse_elem(y, d)) for x, y in poly["vertices"]])
            else:
                pts = [Vec2(FieldElem(0, 0, d), FieldElem(0, 0, d))]
                for x, y in poly["edges"]:
                    pts.append(pts[-1] + Vec2(parse_elem(x, d), parse_elem(y, d)))
                if not pts[-1].is_zero():
                    raise SurfaceError("not_closed", "polygon edges do not close up")
                polys.append(pts[:-1])
        comps.append(
            {
                "label": comp.get("label"),
                "polygons": polys,
                "gluings": [tuple(tuple(x) for x in g) for g in comp.get("gluings", [])],
                "marked": [tuple(x) for x in comp.get("marked", [])],
            }
        )
        if comps[-1]["label"] is None:
            comps[-1]["label"] = str(len(comps) - 1)
    return build(comps, d)[0]


def loads(text: str) -> Surface:
    return build_from_json(json.loads(text))


# ---------------------------------------------------------------------------
# flips, Delaunay, canonical form


def flip(
    triangles: list[list],
    gluing: dict[HalfEdge, HalfEdge],
    t: int,
    i: int,
    layers: Sequence[list[list]] = (),
) -> None:
    """Flip the edge (t, i) in place.  ``layers`` are further edge functions
    (cocycles) stored like ``triangles`` and transported through the flip."""
    u, j = gluing[(t, i)]
    if u == t:
        raise SurfaceError("bad_flip", "cannot flip an edge glued to its own triangle")
    old_out = {
        "DB": (u, (j + 2) % 3),
        "BC": (t, (i + 1) % 3),
        "CA": (t, (i + 2) % 3),
        "AD": (u, (j + 1) % 3),
    }
    new_pos = {"DB": (t, 0), "BC": (t, 1), "CA": (u, 0), "AD": (u, 1)}
    partners = {k: gluing[h] for k, h in old_out.items()}
    inv = {h: k for k, h in old_out.items()}
    for arr in (triangles, *layers):
        db, bc = arr[u][(j + 2) % 3], arr[t][(i + 1) % 3]
        ca, ad = arr[t][(i + 2) % 3], arr[u][(j + 1) % 3]
        arr[t] = [db, bc, -(db + bc)]
        arr[u] = [ca, ad, -(ca + ad)]
    for k in ("DB", "BC", "CA", "AD"):
        gluing.pop(old_out[k], None)
    gluing.pop((t, i), None)
    gluing.pop((u, j), None)
    for k, p in partners.items():
        tgt = new_pos[inv[p]] if p in inv else p
        gluing[new_pos[k]] = tgt
        gluing[tgt] = new_pos[k]
    gluing[(t, 2)] = (u, 2)
    gluing[(u, 2)] = (t, 2)


def incircle(triangles, gluing, t: int, i: int) -> int:
    """>0 if the apex across edge (t, i) is strictly inside the circumcircle of t."""
    tri = triangles[t]
    u, j = gluing[(t, i)]
    a = Vec2(FieldElem(0, 0, tri[0][0].d), FieldElem(0, 0, tri[0][0].d))
    b = tri[i]
    c = tri[i] + tri[(i + 1) % 3]
    dpt = triangles[u][(j + 1) % 3]
    rows = []
    for p in (a, b, c):
        q = p - dpt
        rows.append((q[0], q[1], q.norm2()))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    det = a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)
    return det.sign()


def delaunay_arrays(triangles, gluing, layers=(), max_flips: int = 100000):
    flips = 0
    changed = True
    while changed:
        changed = False
        for t in range(len(triangles)):
            for i in range(3):
                if incircle(triangles, gluing, t, i) > 0:
                    flip(triangles, gluing, t, i, layers)
                    flips += 1
                    if flips > max_flips:
                        raise SurfaceError("no_convergence", "Delaunay flipping did not terminate")
                    changed = True
    return flips


def delaunay(s: Surface) -> Surface:
    tris = [list(t) for t in s.triangles]
    glue = dict(s.gluing)
    delaunay_arrays(tris, glue)
    return Surface(tris, glue, s.labels, s.d)


def _elem_key(x: FieldElem):
    return (x.a, x.b)


def _cells(tris, glue, tri_set):
    """Delaunay cells (merging triangles across cocircular edges) as boundary half-edge cycles."""
    flat = set()
    for t in tri_set:
        for i in range(3):
            if incircle(tris, glue, t, i) == 0:
                flat.add((t, i))
    seen = set()
    cells = []
    for t in sorted(tri_set):
        for i in range(3):
            h = (t, i)
            if h in flat or h in seen:
                continue
            cyc = []
            x = h
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                nt, ni = x[0], (x[1] + 1) % 3
                while (nt, ni) in flat:
                    ot, oj = glue[(nt, ni)]
                    nt, ni = ot, (oj + 1) % 3
                x = (nt, ni)
            cells.append(cyc)
    return cells


def _canonical_component(tris, glue, tri_set, d):
    cells = _cells(tris, glue, tri_set)
    cell_of = {}
    for ci, cyc in enumerate(cells):
        for k, h in enumerate(cyc):
            cell_of[h] = (ci, k)
    best = None
    for start in sorted(cell_of):
        label = {}
        rot = {}
        order = []
        c0, k0 = cell_of[start]
        label[c0] = 0
        rot[c0] = k0
        order.append(c0)
        enc = []
        q = 0
        while q < len(order):
            c = order[q]
            q += 1
            cyc = cells[c]
            m = len(cyc)
            enc.append(("n", m))
            for s in range(m):
                h = cyc[(rot[c] + s) % m]
                v = tris[h[0]][h[1]]
                o = glue[h]
                oc, ok = cell_of[o]
                if oc not in label:
                    label[oc] = len(order)
                    rot[oc] = ok
                    order.append(oc)
                enc.append((_elem_key(v[0]), _elem_key(v[1]), label[oc], (ok - rot[oc]) % len(cells[oc])))
            if best is not None and enc > best[0][: len(enc)]:
                break
        else:
            if best is None or enc < best[0]:
                best = (enc, order, rot)
    _, order, rot = best
    # fan-triangulate each cell from its first vertex
    new_tris = []
    new_glue: dict[HalfEdge, HalfEdge] = {}
    pos: dict[tuple[int, int], HalfEdge] = {}
    for c in order:
        cyc = cells[c]
        m = len(cyc)
        vs = [tris[h[0]][h[1]] for h in (cyc[(rot[c] + s) % m] for s in range(m))]
        base = len(new_tris)
        acc = vs[0]
        pos[(c, 0)] = (base, 0)
        for k in range(1, m - 1):
            nxt = acc + vs[k]
            new_tris.append([acc, vs[k], -nxt])
            pos[(c, k)] = (base + k - 1, 1)
            if k < m - 2:
                new_glue[(base + k - 1, 2)] = (base + k, 0)
                new_glue[(base + k, 0)] = (base + k - 1, 2)
            acc = nxt
        pos[(c, m - 1)] = (base + m - 3, 2)
    for c in order:
        cyc = cells[c]
        m = len(cyc)
        for s in range(m):
            oc, ok = cell_of[glue[cyc[(rot[c] + s) % m]]]
            new_glue[pos[(c, s)]] = pos[(oc, (ok - rot[oc]) % len(cells[oc]))]
    return new_tris, new_glue


def canonical_form(s: Surface) -> Surface:
    """Exact Delaunay decomposition followed by the lexicographically minimal relabeling."""
    tris = [list(t) for t in s.triangles]
    glue = dict(s.gluing)
    delaunay_arrays(tris, glue)
    all_tris = []
    all_glue: dict[HalfEdge, HalfEdge] = {}
    for k in range(len(s.labels)):
        tri_set = [t for t in range(len(tris)) if s.tri_component[t] == k]
        ct, cg = _canonical_component(tris, glue, tri_set, s.d)
        base = len(all_tris)
        all_tris.extend(ct)
        for (a, i), (b, j) in cg.items():
            all_glue[(a + base, i)] = (b + base, j)
    return Surface(all_tris, all_glue, s.labels, s.d)


def component_keys(s: Surface) -> list:
    c = canonical_form(s)
    keys = []
    for k, label in enumerate(c.labels):
        tri_ids = [t for t in range(c.num_triangles) if c.tri_component[t] == k]
        base = tri_ids[0]
        tris = tuple(tuple((e[0].a, e[0].b, e[1].a, e[1].b) for e in c.triangles[t]) for t in tri_ids)
        glue = tuple(sorted(((a - base, i), (b - base, j)) for (a, i), (b, j) in c.gluing.items() if a in tri_ids))
        keys.append((label, (tris, glue)))
    return keys


def is_isomorphic(s1: Surface, s2: Surface, match_labels: bool = False) -> bool:
    """Translation equivalence; with several components compares the multiset of
    components, or the label -> component map when ``match_labels`` is set."""
    if s1.d != s2.d:
        rational = all(e[0].is_rational() and e[1].is_rational() for s in (s1, s2) for t in s.triangles for e in t)
        if not rational:
            return False
    k1, k2 = component_keys(s1), component_keys(s2)
    if match_labels:
        return sorted(k1) == sorted(k2)
    return sorted(k for _, k in k1) == sorted(k for _, k in k2)
