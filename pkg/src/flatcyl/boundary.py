"""Cylinder collapse, collapse maps on relative homology, and boundary tangent spaces.

The collapsed surface is assembled from the surviving cylinders.  Their
boundary saddle connections that face collapsed cylinders are identified by
following perpendicular leaves through the collapsed region; endpoints of
those leaves become marked points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactalg import FieldElem, Subspace, Vec2, mat_mul, solve, transpose
from .flow import Decomposition, decompose
from .homology import Homology
from .surface import Surface, SurfaceError, build
from .tangent import InvalidModel, TangentModel


class CollapseError(ValueError):
    pass


@dataclass
class Piece:
    """A subinterval [a, b] of saddle connection ``sc`` (coordinates along the direction)."""

    sc: int
    a: FieldElem
    b: FieldElem


class _Layout:
    """Boundary coordinates of the cylinders of a periodic decomposition."""

    def __init__(self, decomp: Decomposition, collapsed: set[int], depth_budget: int):
        self.decomp = decomp
        self.collapsed = collapsed
        self.budget = depth_budget
        scs = decomp.saddle_connections
        self.lam = [sc.lam for sc in scs]
        self.above: dict[int, int] = {}
        self.below: dict[int, int] = {}
        self.b_off: dict[int, FieldElem] = {}
        self.t_off: dict[int, FieldElem] = {}
        for c in decomp.cylinders:
            acc = c.lam * 0
            for n in c.bottom:
                self.above[n] = c.index
                self.b_off[n] = acc
                acc = acc + self.lam[n]
            acc = c.lam * 0
            for n in c.top:
                self.below[n] = c.index
                self.t_off[n] = acc
                acc = acc + self.lam[n]

    def _top_pieces(self, cyl, z0, length, depth) -> list[tuple[FieldElem, Piece]]:
        """Split the top-circle interval [z0, z0 + length] of ``cyl`` by top saddle connections.

        Returns (offset within the interval, piece) pairs."""
        out = []
        lam = cyl.lam
        z = z0
        while z >= lam:
            z = z - lam
        while z.sign() < 0:
            z = z + lam
        done = length * 0
        guard = 0
        while done < length:
            guard += 1
            if guard > 4 * (len(cyl.top) + 1) * (1 + int(float(length / lam)) + 1):
                raise CollapseError("interval splitting did not terminate")
            for n in cyl.top:
                s0 = self.t_off[n]
                s1 = s0 + self.lam[n]
                if s0 <= z < s1:
                    take = min(s1 - z, length - done)
                    out.append((done, Piece(n, z - s0, z - s0 + take)))
                    done = done + take
                    z = z + take
                    if z >= lam:
                        z = z - lam
                    break
            else:
                raise CollapseError("point not found on top boundary")
        return out

    def push_up(self, piece: Piece, depth: int = 0) -> list[tuple[FieldElem, FieldElem, Piece]]:
        """Follow perpendicular leaves up from ``piece`` until they reach the bottom of a
        surviving cylinder.  Returns (src_a, src_b, target piece) triples in order."""
        if depth > self.budget:
            raise CollapseError(
                "perpendicular leaves stay in the collapsed region; a closed leaf would be pinched"
            )
        e = self.above[piece.sc]
        if e not in self.collapsed:
            return [(piece.a, piece.b, piece)]
        cyl = self.decomp.cylinders[e]
        y = self.b_off[piece.sc] + piece.a
        out = []
        for off, p in self._top_pieces(cyl, y + cyl.twist, piece.b - piece.a, depth):
            for a2, b2, tgt in self.push_up(p, depth + 1):
                base = piece.a + off - p.a
                out.append((base + a2, base + b2, tgt))
        return out


@dataclass
class CollapseResult:
    surface: Surface
    decomposition: Decomposition
    collapsed: list[int]
    limit: Surface
    homology: Homology
    limit_homology: Homology
    fstar_matrix: list[list[FieldElem]]  # n x n_L; chain row vector c maps to c @ M
    V: Subspace
    ann_v: Subspace
    new_marked: int = 0
    notes: list[str] = field(default_factory=list)

    def pushforward_chain(self, chain: Sequence[int]) -> list[FieldElem]:
        d = self.surface.d
        row = [[FieldElem(x, 0, d) for x in chain]]
        return mat_mul(row, self.fstar_matrix)[0]

    def pullback(self, eta: Sequence[FieldElem]) -> list[FieldElem]:
        """f^*: cocycle on the limit -> cocycle on the surface (lands in Ann V)."""
        return [sum((m * e for m, e in zip(row, eta)), self.surface.zero()) for row in self.fstar_matrix]

    def to_json(self) -> dict:
        return {
            "limit": self.limit.to_json(),
            "limit_signature": [s.to_json() for s in self.limit.signature()],
            "collapsed": self.collapsed,
            "dim_V": self.V.dim,
            "dim_AnnV": self.ann_v.dim,
            "V": self.V.to_json(),
            "AnnV": self.ann_v.to_json(),
            "fstar": [[str(x) for x in row] for row in self.fstar_matrix],
            "new_marked_points": self.new_marked,
        }


def _subdivide(points: set, lam: FieldElem) -> list[FieldElem]:
    zero = lam * 0
    return sorted({zero, lam} | {p for p in points if zero < p < lam})


def collapse(s: Surface, decomp: Decomposition, cyls: Iterable[int], depth_budget: int = 64) -> CollapseResult:
    """Collapse the given parallel cylinders to zero height."""
    if decomp.surface is not s and decomp.surface != s:
        raise CollapseError("decomposition belongs to another surface")
    if not decomp.periodic:
        raise CollapseError("direction is not periodic")
    collapsed = set(cyls)
    if not collapsed:
        raise CollapseError("nothing to collapse")
    for c in collapsed:
        if not 0 <= c < len(decomp.cylinders):
            raise CollapseError(f"no cylinder {c}")
    scs = decomp.saddle_connections
    d = decomp.direction
    comp_of = {c.index: s.tri_component[decomp.strips[c.strips[0]].t] for c in decomp.cylinders}
    for k in range(len(s.labels)):
        cs = [c for c in decomp.cylinders if comp_of[c.index] == k]
        if cs and all(c.index in collapsed for c in cs):
            raise CollapseError(f"collapsed cylinders cover component {s.labels[k]!r}")
    lay = _Layout(decomp, collapsed, depth_budget)
    survivors = [c.index for c in decomp.cylinders if c.index not in collapsed]

    # sources: tops of surviving cylinders facing collapsed ones
    glue_pairs: list[tuple[Piece, Piece]] = []
    cuts: dict[int, set] = {n: set() for n in range(len(scs))}
    for ci in survivors:
        for n in decomp.cylinders[ci].top:
            if lay.above[n] in collapsed:
                for a, b, tgt in lay.push_up(Piece(n, scs[n].lam * 0, scs[n].lam)):
                    glue_pairs.append((Piece(n, a, b), tgt))
                    cuts[n].update((a, b))
                    cuts[tgt.sc].update((tgt.a, tgt.b))
    sub = {n: _subdivide(cuts[n], scs[n].lam) for n in range(len(scs))}

    # polygons of surviving cylinders with subdivided boundaries
    polys: list[list[Vec2]] = []
    edge_key: dict[tuple, tuple[int, int]] = {}
    for pi, ci in enumerate(survivors):
        cyl = decomp.cylinders[ci]
        reach = cyl.thickness / d.norm2()
        kappa = d.rot90() * reach - d * cyl.twist
        pts = [d * 0]
        keys = []
        for n in cyl.bottom:
            start = pts[-1]
            for k, (u, w) in enumerate(zip(sub[n], sub[n][1:])):
                pts.append(start + d * w)
                keys.append(("bottom", n, k))
        tops = [kappa]
        top_keys = []
        for n in cyl.top:
            start = tops[-1]
            for k, (u, w) in enumerate(zip(sub[n], sub[n][1:])):
                tops.append(start + d * w)
                top_keys.append(("top", n, k))
        keys.append(("right", ci))
        pts.extend(reversed(tops))
        keys.extend(reversed(top_keys))
        keys.append(("left", ci))
        polys.append(pts)
        for e, key in enumerate(keys):
            edge_key[key] = (pi, e)

    def sub_edges(n, a, b, side):
        lst = sub[n]
        i0, i1 = lst.index(a), lst.index(b)
        return [edge_key[(side, n, k)] for k in range(i0, i1)]

    gluings: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for ci in survivors:
        gluings.append((edge_key[("right", ci)], edge_key[("left", ci)]))
        for n in decomp.cylinders[ci].bottom:
            if lay.below[n] not in collapsed:
                gluings.append((edge_key[("bottom", n, 0)], edge_key[("top", n, 0)]))
    for src, tgt in glue_pairs:
        a_edges = sub_edges(src.sc, src.a, src.b, "top")
        b_edges = sub_edges(tgt.sc, tgt.a, tgt.b, "bottom")
        if len(a_edges) != len(b_edges):
            raise CollapseError("identified boundary pieces are subdivided differently")
        # top edges run backwards, so pair them in reverse order
        for x, y in zip(a_edges, b_edges):
            gluings.append((x, y))

    # split into connected components
    parent = list(range(len(polys)))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for (p, _), (q, _) in gluings:
        a, b = find(p), find(q)
        if a != b:
            parent[max(a, b)] = min(a, b)
    roots = sorted({find(p) for p in range(len(polys))})
    comps = []
    local_of = {}
    for r_i, r in enumerate(roots):
        members = [p for p in range(len(polys)) if find(p) == r]
        for li, p in enumerate(members):
            local_of[p] = (r_i, li)
        base_label = s.labels[comp_of[survivors[members[0]]]]
        comps.append({"label": base_label, "polygons": [polys[p] for p in members], "gluings": [], "marked": []})
    counts: dict[str, int] = {}
    for c in comps:
        counts[c["label"]] = counts.get(c["label"], 0) + 1
    seen: dict[str, int] = {}
    for c in comps:
        lab = c["label"]
        if counts[lab] > 1:
            seen[lab] = seen.get(lab, 0) + 1
            c["label"] = f"{lab}.{seen[lab]}"
    for (p, e), (q, f) in gluings:
        cp, lp = local_of[p]
        cq, lq = local_of[q]
        comps[cp]["gluings"].append(((lp, e), (lq, f)))
    limit, where = build(comps, s.d)

    def half(key):
        p, e = edge_key[key]
        cp, lp = local_of[p]
        return where[(cp, lp, e)]

    h = Homology(s)
    hl = Homology(limit)

    def chain_of_edges(keys, sign=1):
        acc = [0] * hl.dim
        for key in keys:
            v = hl.half_edge_chain(half(key))
            acc = [x + sign * y for x, y in zip(acc, v)]
        return acc

    def pushed_chain(piece: Piece):
        acc = [0] * hl.dim
        for _, _, tgt in lay.push_up(piece):
            keys = [("bottom", tgt.sc, k) for k in range(sub[tgt.sc].index(tgt.a), sub[tgt.sc].index(tgt.b))]
            v = chain_of_edges(keys)
            acc = [x + y for x, y in zip(acc, v)]
        return acc

    gens_src: list[list[int]] = []
    gens_img: list[list[int]] = []
    for n, sc in enumerate(scs):
        gens_src.append(h.chain(sc.chain))
        lo, up = lay.below[n], lay.above[n]
        if up not in collapsed:
            keys = [("bottom", n, k) for k in range(len(sub[n]) - 1)]
            gens_img.append(chain_of_edges(keys))
        elif lo not in collapsed:
            keys = [("top", n, k) for k in range(len(sub[n]) - 1)]
            gens_img.append(chain_of_edges(keys, -1))
        else:
            gens_img.append(pushed_chain(Piece(n, sc.lam * 0, sc.lam)))
    for cyl in decomp.cylinders:
        gens_src.append(h.chain(cyl.cross.chain))
        if cyl.index not in collapsed:
            gens_img.append(chain_of_edges([("right", cyl.index)]))
        else:
            acc = [0] * hl.dim
            tau = cyl.twist
            zero = tau * 0
            for n in cyl.top:
                s0 = lay.t_off[n]
                s1 = s0 + scs[n].lam
                lo_, hi_ = max(s0, zero), min(s1, tau)
                if lo_ < hi_:
                    v = pushed_chain(Piece(n, lo_ - s0, hi_ - s0))
                    acc = [x - y for x, y in zip(acc, v)]
            gens_img.append(acc)

    dd = s.d
    G = [[FieldElem(x, 0, dd) for x in row] for row in gens_src]
    F = [[FieldElem(x, 0, dd) for x in row] for row in gens_img]
    cols = []
    for j in range(hl.dim):
        x = solve(G, [row[j] for row in F], h.dim)
        if x is None:
            raise CollapseError("collapse map is inconsistent on the generators")
        cols.append(x)
    M = transpose(cols) if cols else [[] for _ in range(h.dim)]
    if hl.dim:
        V = Subspace.from_equations(transpose(M), h.dim, dd)
        ann = Subspace(transpose(M), h.dim, dd)
    else:
        V = Subspace.full(h.dim, dd)
        ann = Subspace.zero(h.dim, dd)
    if ann != V.annihilator():
        raise CollapseError("image of f^* is not the annihilator of V")
    if ann.dim != hl.dim:
        raise CollapseError("f^* is not injective")
    lost = sum((decomp.cylinders[c].area for c in collapsed), s.zero())
    if limit.area() != s.area() - lost:
        raise CollapseError("area of the limit is wrong")
    new_marked = limit.num_vertices - s.num_vertices
    res = CollapseResult(s, decomp, sorted(collapsed), limit, h, hl, M, V, ann, new_marked)
    _check_holonomy(res)
    return res


def _check_holonomy(res: CollapseResult) -> None:
    """f^* hol(limit) = hol(surface) - i sum_{C collapsed} e^{i theta} h_C I(alpha_C)."""
    h, hl = res.homology, res.limit_homology
    decomp = res.decomposition
    lx, ly = hl.hol()
    px, py = res.pullback(lx), res.pullback(ly)
    xs, ys = h.hol()
    for ci in res.collapsed:
        cyl = decomp.cylinders[ci]
        w = cyl.twist_hol.rot90()
        dual = h.dual_cocycle(cyl.core_exits)
        xs = [x - w[0] * k for x, k in zip(xs, dual)]
        ys = [y - w[1] * k for y, k in zip(ys, dual)]
    if px != xs or py != ys:
        raise CollapseError("pulled-back limit holonomy does not match the collapse path")


def boundary_tangent(res: CollapseResult, model: TangentModel) -> TangentModel:
    """T(M') = T(M) cap Ann(V), carried to the limit through (f^*)^{-1}."""
    if model.homology.basis_hash() != res.homology.basis_hash():
        raise InvalidModel("model is for a different basis")
    inter = model.space.intersect(res.ann_v)
    hl = res.limit_homology
    vecs = []
    for v in inter.basis():
        eta = solve(res.fstar_matrix, v, hl.dim)
        if eta is None:
            raise InvalidModel("intersection is not in the image of f^*")
        vecs.append(eta)
    out = TangentModel(Subspace(vecs, hl.dim, hl.surface.d), hl, "boundary" if model.kind != "stratum" else "stratum-boundary")
    try:
        out.check()
    except InvalidModel as e:
        raise InvalidModel("boundary model misses the tautological classes of the limit") from e
    return out


def component_coordinates(hl: Homology, label: str) -> list[int]:
    s = hl.surface
    k = s.labels.index(label)
    return [i for i, e in enumerate(hl.basis) if s.tri_component[hl.edges[e][0]] == k]


def pushforward(model: TangentModel, label: str) -> TangentModel:
    """Restrict a model on a multicomponent surface to one labeled component."""
    hl = model.homology
    s = hl.surface
    if label not in s.labels:
        raise SurfaceError("unknown_label", f"no component labeled {label!r}", label)
    coords = component_coordinates(hl, label)
    comp = s.project_component(label)
    hc = Homology(comp)
    # the sub-basis of a component is the basis of the component on its own
    k = s.labels.index(label)
    tris = [t for t in range(s.num_triangles) if s.tri_component[t] == k]
    renum = {t: i for i, t in enumerate(tris)}
    mine = [(renum[hl.edges[hl.basis[i]][0]], hl.edges[hl.basis[i]][1]) for i in coords]
    theirs = [hc.edges[b] for b in hc.basis]
    if mine != theirs:
        raise RuntimeError("component basis does not match the restricted basis")
    vecs = [[v[i] for i in coords] for v in model.space.basis()]
    out = TangentModel(Subspace(vecs, len(coords), s.d), hc, model.kind)
    out.check()
    return out


# ---------------------------------------------------------------------------
# collapse paths


@dataclass
class CollapsePath:
    """Heights of the chosen cylinders scaled by t in (0, 1]; t -> 0 is the collapse."""

    surface: Surface
    decomposition: Decomposition
    collapsed: list[int]

    def sample(self, t) -> Surface:
        from .deform import assemble

        s = self.surface
        t = s.elem(t)
        if not (t.sign() > 0 and t <= 1):
            raise ValueError("collapse path parameter must lie in (0, 1]")
        th = {c: self.decomposition.cylinders[c].thickness * t for c in self.collapsed}
        return assemble(self.decomposition, th, {})


def _locate(path: CollapsePath, st: Surface):
    """Decomposition of a sample and the indices of the collapsing cylinders in it."""
    from .deform import assembled_triangle_owner

    owner = assembled_triangle_owner(path.decomposition)
    dec = decompose(st, path.decomposition.direction)
    found = {}
    for x in dec.cylinders:
        found.setdefault(owner[dec.strips[x.strips[0]].t], set()).add(x.index)
    out = []
    for c in path.collapsed:
        hits = found.get(c, set())
        if len(hits) != 1:
            raise CollapseError("collapsing cylinder is not identified uniquely on the sample")
        out.append(hits.pop())
    return dec, out


def vanishing_is_stable(path: CollapsePath, samples: Sequence) -> bool:
    """V computed at every sample agrees in the common basis of the path.

    Samples are reassembled from the same cylinder polygons, so they share a
    triangulation and hence a homology basis."""
    if not samples:
        raise ValueError("no samples")
    ref = None
    for t in samples:
        st = path.sample(t)
        dec, cyls = _locate(path, st)
        v = collapse(st, dec, cyls).V
        if ref is None:
            ref = (st.gluing, v)
        elif st.gluing != ref[0] or v != ref[1]:
            return False
    return True
