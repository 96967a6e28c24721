"""Deformations in period coordinates and intrinsic cylinder shears/stretches."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .exactalg import FieldElem, Vec2
from .flow import Cylinder, Decomposition
from .homology import Homology
from .surface import Surface, SurfaceError, build, delaunay_arrays


class DegenerateTriangle(SurfaceError):
    def __init__(self, message, triangle=None):
        super().__init__("degenerate_triangle", message, triangle)


class StaleDecomposition(ValueError):
    pass


def _valid(tris) -> int | None:
    for t, tri in enumerate(tris):
        if tri[0].cross(tri[1]).sign() <= 0:
            return t
    return None


def add_layer(s: Surface, layer: Sequence[Sequence[Vec2]], max_halvings: int = 12, max_steps: int = 64) -> Surface:
    """Add an edge cocycle given per triangle (same layout as ``s.triangles``)."""
    tris = [list(t) for t in s.triangles]
    glue = dict(s.gluing)
    rem = [list(r) for r in layer]
    for _ in range(max_steps):
        frac = 1
        bad = None
        for _h in range(max_halvings + 1):
            cand = [[e + x / frac for e, x in zip(tri, r)] for tri, r in zip(tris, rem)]
            bad = _valid(cand)
            if bad is None:
                break
            frac *= 2
        else:
            raise DegenerateTriangle(f"triangle {bad} degenerates even for tiny steps", bad)
        tris = cand
        if frac == 1:
            return Surface(tris, glue, s.labels, s.d)
        rem = [[x - x / frac for x in r] for r in rem]
        delaunay_arrays(tris, glue, layers=[rem])
    raise DegenerateTriangle("too many retriangulation steps", bad)


def add_cocycle(s: Surface, xi: Sequence[Vec2], homology: Homology | None = None, **kw) -> Surface:
    """(X, omega, Sigma) + xi, with xi given by its values on the homology basis."""
    h = homology or Homology(s)
    if h.surface is not s and h.surface != s:
        raise StaleDecomposition("homology basis belongs to another surface")
    if len(xi) != h.dim:
        raise ValueError(f"cocycle has {len(xi)} coordinates, expected {h.dim}")
    return add_layer(s, h.half_edge_layer(list(xi)), **kw)


def validity_box(s: Surface, xi: Sequence[Vec2], homology: Homology | None = None) -> FieldElem:
    """A cap T <= 1 such that s + t*xi needs no retriangulation for |t| <= T.

    For a triangle with edges e0, e1 the doubled area of the moved triangle is
    A + t*L + t^2*Q; keeping |t| (|L| + |Q|) <= A/2 keeps it positive.
    """
    h = homology or Homology(s)
    layer = h.half_edge_layer(list(xi))
    cap = s.elem(1)
    for tri, x in zip(s.triangles, layer):
        area2 = tri[0].cross(tri[1])
        spread = abs(tri[0].cross(x[1]) + x[0].cross(tri[1])) + abs(x[0].cross(x[1]))
        if spread.sign() > 0:
            cap = min(cap, area2 / (2 * spread))
    return cap


def core_dual(h: Homology, cyl: Cylinder) -> list[int]:
    return h.dual_cocycle(cyl.core_exits)


def twist_cocycle(h: Homology, decomp: Decomposition, coeffs: dict[int, FieldElem]) -> list[Vec2]:
    """sum t_i e^{i theta} h_i I(alpha_i) as a Vec2-valued cocycle."""
    zero = Vec2(h.surface.zero(), h.surface.zero())
    xi = [zero] * h.dim
    for idx, t in coeffs.items():
        cyl = decomp.cylinders[idx]
        w = cyl.twist_hol * t
        for k, n in enumerate(core_dual(h, cyl)):
            if n:
                xi[k] = xi[k] + w * n
    return xi


def stretch_cocycle(h: Homology, decomp: Decomposition, coeffs: dict[int, FieldElem]) -> list[Vec2]:
    """sum s_i i e^{i theta} h_i I(alpha_i)."""
    return [v.rot90() for v in twist_cocycle(h, decomp, coeffs)]


def standard_twist(h: Homology, decomp: Decomposition, cyls: Iterable[int]) -> list[Vec2]:
    one = FieldElem(1, 0, h.surface.d)
    return twist_cocycle(h, decomp, {i: one for i in cyls})


# ---------------------------------------------------------------------------
# intrinsic route: rebuild the surface from cylinder parallelograms


def cylinder_polygon(decomp: Decomposition, cyl: Cylinder, thickness, twist):
    """Vertices of the cylinder as a polygon, and the saddle connection carried by each edge.

    Edges: bottom saddle connections in flow order, right side, top saddle
    connections reversed, left side.  Sides carry ``None``.
    """
    d = cyl.direction
    scs = decomp.saddle_connections
    reach = thickness / d.norm2()
    kappa = d.rot90() * reach - d * twist
    pts = [d * 0]
    for n in cyl.bottom:
        pts.append(pts[-1] + scs[n].hol)
    tops = [kappa]
    for n in cyl.top:
        tops.append(tops[-1] + scs[n].hol)
    pts.extend(reversed(tops))
    carried = [("bottom", n) for n in cyl.bottom] + [("side", None)] + [("top", n) for n in reversed(cyl.top)] + [("side", None)]
    return pts, carried


def assemble(decomp: Decomposition, thickness: dict[int, FieldElem], twist: dict[int, FieldElem]) -> Surface:
    """Glue cylinder parallelograms with the given per-cylinder thickness and twist."""
    s = decomp.surface
    comp_of = {c.index: s.tri_component[decomp.strips[c.strips[0]].t] for c in decomp.cylinders}
    per_comp: dict[int, list[int]] = {}
    for c in decomp.cylinders:
        per_comp.setdefault(comp_of[c.index], []).append(c.index)
    comps = []
    for k, label in enumerate(s.labels):
        cyl_ids = per_comp.get(k, [])
        polys = []
        where_bottom = {}
        where_top = {}
        glue = []
        for local, ci in enumerate(cyl_ids):
            cyl = decomp.cylinders[ci]
            pts, carried = cylinder_polygon(decomp, cyl, thickness.get(ci, cyl.thickness), twist.get(ci, cyl.twist))
            polys.append(pts)
            nb = len(cyl.bottom)
            for e, (kind, n) in enumerate(carried):
                if kind == "bottom":
                    where_bottom[n] = (local, e)
                elif kind == "top":
                    where_top[n] = (local, e)
            glue.append(((local, nb), (local, len(carried) - 1)))
        for n, pe in where_bottom.items():
            glue.append((pe, where_top[n]))
        comps.append({"label": label, "polygons": polys, "gluings": glue, "marked": []})
    return build(comps, s.d)[0]


def assembled_triangle_owner(decomp: Decomposition) -> list[int]:
    """Cylinder index owning each triangle of ``assemble(decomp, ...)``."""
    s = decomp.surface
    owner = []
    for k in range(len(s.labels)):
        for c in decomp.cylinders:
            if s.tri_component[decomp.strips[c.strips[0]].t] == k:
                owner.extend([c.index] * (len(c.bottom) + len(c.top)))
    return owner


def _check_fresh(s: Surface, decomp: Decomposition):
    if decomp.surface is not s and decomp.surface != s:
        raise StaleDecomposition("decomposition was computed on another surface")
    if not decomp.periodic:
        raise ValueError("decomposition is not periodic")


def shear_cylinders(s: Surface, decomp: Decomposition, cyls: Iterable[int], t) -> Surface:
    """u_t applied inside the chosen cylinders only."""
    _check_fresh(s, decomp)
    t = s.elem(t)
    tw = {}
    for ci in cyls:
        c = decomp.cylinders[ci]
        tw[ci] = c.twist - t * c.thickness / c.direction.norm2()
    return assemble(decomp, {}, tw)


def stretch_cylinders(s: Surface, decomp: Decomposition, cyls: Iterable[int], sfac) -> Surface:
    """Scale heights of the chosen cylinders by (1 + s), keeping twists."""
    _check_fresh(s, decomp)
    sfac = s.elem(sfac)
    if (sfac + 1).sign() <= 0:
        raise ValueError("stretch would make a cylinder height nonpositive")
    th = {ci: decomp.cylinders[ci].thickness * (sfac + 1) for ci in cyls}
    return assemble(decomp, th, {})


@dataclass
class LinearPath:
    base: Surface
    xi: list[Vec2]
    homology: Homology
    interval: tuple = (0, 1)

    def sample(self, t) -> Surface:
        return sample(self, t)


def make_path(s: Surface, xi: Sequence[Vec2], homology: Homology | None = None, interval=(0, 1)) -> LinearPath:
    return LinearPath(s, list(xi), homology or Homology(s), interval)


def sample(path: LinearPath, t) -> Surface:
    t = path.base.elem(t)
    lo, hi = (path.base.elem(x) for x in path.interval)
    if not (lo <= t <= hi):
        raise ValueError(f"parameter {t} outside {path.interval}")
    if t.is_zero():
        return path.base
    return add_cocycle(path.base, [v * t for v in path.xi], path.homology)
