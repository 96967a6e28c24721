"""Standard example surfaces."""

from __future__ import annotations

from fractions import Fraction

from .exactalg import FieldElem, Vec2
from .surface import Surface, build


def _v(x, y, d=1) -> Vec2:
    return Vec2(FieldElem(x, 0, d) if not isinstance(x, FieldElem) else x, FieldElem(y, 0, d) if not isinstance(y, FieldElem) else y)


def rectangle_component(label, w, h, d=1):
    pts = [_v(0, 0, d), _v(w, 0, d), _v(w, h, d), _v(0, h, d)]
    return {"label": label, "polygons": [pts], "gluings": [((0, 0), (0, 2)), ((0, 1), (0, 3))], "marked": []}


def torus(w=1, h=1, label="T") -> Surface:
    return build([rectangle_component(label, w, h)])[0]


def square_tiled(r: list[int], u: list[int], label="S") -> Surface:
    """Square-tiled surface: square k has right neighbor r[k] and top neighbor u[k] (0-based)."""
    n = len(r)
    if sorted(r) != list(range(n)) or sorted(u) != list(range(n)):
        raise ValueError("r and u must be permutations")
    polys = [[_v(0, 0), _v(1, 0), _v(1, 1), _v(0, 1)] for _ in range(n)]
    glue = []
    for k in range(n):
        glue.append(((k, 1), (r[k], 3)))
        glue.append(((k, 2), (u[k], 0)))
    return build([{"label": label, "polygons": polys, "gluings": glue, "marked": []}])[0]


def l_shape(a=2, b=1, c=1, e=1, d=1, label="L") -> Surface:
    """L-shaped table: a x b base square plus a c-wide, e-tall column over its left part.

    Requires c < a.  The defaults give the 3-square L in H(2).
    """
    z = FieldElem(0, 0, d)

    def f(x):
        return x if isinstance(x, FieldElem) else FieldElem(x, 0, d)

    a, b, c, e = f(a), f(b), f(c), f(e)
    # polygon with vertices (0,0) (a,0) (a,b) (c,b) (c,b+e) (0,b+e) (0,b)
    if c == a:
        raise ValueError("column must be narrower than the base")
    pts = [
        Vec2(z, z),
        Vec2(c, z),
        Vec2(a, z),
        Vec2(a, b),
        Vec2(c, b),
        Vec2(c, b + e),
        Vec2(z, b + e),
        Vec2(z, b),
    ]
    # edges: 0 (0,0)-(c,0); 1 (c,0)-(a,0); 2 right of base; 3 top of base right part;
    # 4 right of column; 5 top of column; 6 left of column; 7 left of base
    glue = [((0, 0), (0, 5)), ((0, 1), (0, 3)), ((0, 2), (0, 7)), ((0, 4), (0, 6))]
    return build([{"label": label, "polygons": [pts], "gluings": glue, "marked": []}], d)[0]


def golden_l(label="G") -> Surface:
    """Golden L: unit square with a (phi - 1) x 1 square-ish rectangle attached, over Q(sqrt 5).

    Base is phi x 1, column is 1 x (phi - 1)... concretely the L with a = phi,
    b = 1, c = 1, e = phi - 1, a Veech surface in H(2).
    """
    phi = FieldElem(Fraction(1, 2), Fraction(1, 2), 5)
    return l_shape(phi, 1, 1, phi - 1, d=5, label=label)


def marked_torus(label="M") -> Surface:
    """Unit torus with marked points at (0, 0) and (0, 1/2)."""
    h = Fraction(1, 2)
    pts0 = [_v(0, 0), _v(1, 0), _v(1, h), _v(0, h)]
    pts1 = [_v(0, h), _v(1, h), _v(1, 1), _v(0, 1)]
    pts1 = [p - _v(0, h) for p in pts1]
    glue = [((0, 1), (0, 3)), ((1, 1), (1, 3)), ((0, 2), (1, 0)), ((1, 2), (0, 0))]
    return build([{"label": label, "polygons": [pts0, pts1], "gluings": glue, "marked": [(0, 0), (1, 0)]}])[0]


def disjoint_union(*surfaces: Surface) -> Surface:
    tris, glue, labels = [], {}, []
    d = 1
    for s in surfaces:
        if s.d != 1:
            d = s.d
    for s in surfaces:
        base = len(tris)
        tris.extend(s.triangles)
        for (a, i), (b, j) in s.gluing.items():
            glue[(a + base, i)] = (b + base, j)
        labels.extend(s.labels)
    return Surface(tris, glue, labels, d)


def homologous_pair(label="H") -> Surface:
    """4-square surface in H(2, 0) with two homologous horizontal cylinders."""
    return square_tiled([0, 1, 3, 2], [1, 2, 0, 3], label=label)


# one-square tori (squares 0, 1) and two 2-square cylinders with twist 1
REBIRTH_RIGHT = [0, 1, 3, 2, 5, 4]
REBIRTH_UP = [2, 4, 5, 1, 3, 0]


def rebirth(t=1, label="R") -> Surface:
    """Two unit tori joined by two parallel cylinders of circumference 2 and height t.

    The cylinders have crossing saddle connections (-1, t) and (1, t), their
    cores are homologous, and collapsing both leaves two tori with one marked
    point each.  The surface lies in H(2, 2).
    """
    from .deform import assemble
    from .flow import decompose

    base = square_tiled(REBIRTH_RIGHT, REBIRTH_UP, label=label)
    t = base.elem(t)
    if t.sign() <= 0:
        raise ValueError("height must be positive")
    dec = decompose(base, _v(1, 0))
    return assemble(dec, {c.index: t for c in dec.cylinders if c.lam == 2}, {})


def rebirth_cylinders(dec) -> list[int]:
    """Indices of the two height-t cylinders in a horizontal decomposition of ``rebirth``."""
    return [c.index for c in dec.cylinders if c.lam == 2]


def three_cylinders(label="C") -> Surface:
    """Horizontal cylinders with circumferences 1, 1, 40 and moduli 1, 2, 1.

    The two small cylinders sit between the bottom and top of the big one.
    """
    sq = [_v(0, 0), _v(1, 0), _v(1, 1), _v(0, 1)]
    tall = [_v(0, 0), _v(1, 0), _v(1, 2), _v(0, 2)]
    big = [_v(0, 0), _v(38, 0), _v(39, 0), _v(40, 0), _v(40, 40), _v(2, 40), _v(1, 40), _v(0, 40)]
    glue = [
        ((0, 1), (0, 3)),
        ((1, 1), (1, 3)),
        ((2, 3), (2, 7)),
        ((2, 0), (2, 4)),
        ((0, 0), (2, 6)),
        ((0, 2), (2, 1)),
        ((1, 0), (2, 5)),
        ((1, 2), (2, 2)),
    ]
    return build([{"label": label, "polygons": [sq, tall, big], "gluings": glue, "marked": []}])[0]
