import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catalog import ORIGAMIS, surfaces
from flatcyl.exactalg import FieldElem, Vec2
from flatcyl.fixtures import disjoint_union, golden_l, l_shape, square_tiled, torus
from flatcyl.surface import (
    GL2,
    Surface,
    SurfaceError,
    build,
    canonical_form,
    delaunay,
    flip,
    is_isomorphic,
    loads,
)
from oracles import euler_genus, origami_genus, origami_vertex_orders, vertex_classes


@pytest.mark.parametrize("name", sorted(ORIGAMIS))
def test_origami_signature_matches_commutator(name):
    r, u = ORIGAMIS[name]
    (sig,) = square_tiled(r, u).signature()
    assert sorted(sig.kappa) == origami_vertex_orders(r, u)
    assert sig.genus == origami_genus(r, u)
    assert sig.marked == len(origami_vertex_orders(r, u))


@pytest.mark.parametrize("name", sorted(surfaces()))
def test_genus_and_vertices_match_euler_characteristic(name):
    s, _ = surfaces()[name]
    (sig,) = s.signature()
    assert sig.genus == euler_genus(s)
    assert s.num_vertices == vertex_classes(s)
    assert sum(sig.kappa) == 2 * sig.genus - 2


def test_area():
    assert torus(3, 2).area() == 6
    assert l_shape().area() == 3
    r, u = ORIGAMIS["twelve"]
    assert square_tiled(r, u).area() == 12


def test_golden_l_lives_in_quadratic_field():
    s = golden_l()
    assert s.d == 5
    assert s.signature()[0].kappa == (2,)


def test_json_round_trip():
    for s, _ in surfaces().values():
        again = loads(s.dumps())
        assert is_isomorphic(again, s)
        assert again.dumps() == loads(again.dumps()).dumps()


def test_json_edges_form():
    data = {
        "field": {"kind": "rational", "d": 1},
        "components": [
            {
                "label": "T",
                "polygons": [{"edges": [["1", "0"], ["0", "1"], ["-1", "0"], ["0", "-1"]]}],
                "gluings": [[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
            }
        ],
    }
    s = loads(json.dumps(data))
    assert is_isomorphic(s, torus())


@pytest.mark.parametrize(
    "mutate,code",
    [
        (lambda c: c["polygons"][0].reverse(), "negative_area"),
        (lambda c: c["gluings"].pop(), None),
        (lambda c: c["gluings"].__setitem__(0, ((0, 0), (0, 1))), None),
    ],
)
def test_invalid_polygons_are_rejected(mutate, code):
    comp = {
        "label": "T",
        "polygons": [[Vec2(FieldElem(0), FieldElem(0)), Vec2(FieldElem(1), FieldElem(0)),
                      Vec2(FieldElem(1), FieldElem(1)), Vec2(FieldElem(0), FieldElem(1))]],
        "gluings": [((0, 0), (0, 2)), ((0, 1), (0, 3))],
        "marked": [],
    }
    mutate(comp)
    with pytest.raises(SurfaceError) as err:
        build([comp])
    if code:
        assert err.value.code == code


def test_non_squarefree_field_rejected():
    with pytest.raises(SurfaceError):
        build([], d=4)


def test_canonical_form_ignores_triangulation():
    s = l_shape()
    tris = [list(t) for t in s.triangles]
    glue = dict(s.gluing)
    rng = random.Random(3)
    flips = 0
    while flips < 5:
        t, i = rng.randrange(len(tris)), rng.randrange(3)
        u, _ = glue[(t, i)]
        if u == t:
            continue
        trial_t, trial_g = [list(x) for x in tris], dict(glue)
        flip(trial_t, trial_g, t, i)
        if all(tri[0].cross(tri[1]).sign() > 0 for tri in trial_t):
            tris, glue = trial_t, trial_g
            flips += 1
    flipped = Surface(tris, glue, s.labels, s.d)
    assert flipped != s
    assert canonical_form(flipped) == canonical_form(s)
    assert is_isomorphic(delaunay(flipped), s)


def test_isomorphism_detects_different_surfaces():
    assert not is_isomorphic(torus(2, 1), torus(1, 2))
    assert not is_isomorphic(l_shape(), square_tiled(*ORIGAMIS["L"]).apply_gl2(GL2(1, 1, 0, 1)))
    assert is_isomorphic(torus(1, 1), torus(1, 1).apply_gl2(GL2.u(1)))


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3))
def test_shear_by_integer_preserves_square_tiled(k):
    r, u = ORIGAMIS["eierlegende"]
    s = square_tiled(r, u)
    # both horizontal cylinders have circumference 4 and height 1, so u_4 fixes the surface
    assert is_isomorphic(s.apply_gl2(GL2.u(4 * k)), s)


def test_gl2_requires_positive_determinant():
    with pytest.raises(SurfaceError):
        GL2(1, 0, 0, -1)
    g = GL2.diag(2, 3) @ GL2.u(1)
    assert g.m == (2, 2, 0, 3)


def test_multicomponent_labels_and_projection():
    s = disjoint_union(torus(label="A"), l_shape(label="B"))
    assert s.labels == ("A", "B")
    assert [sig.genus for sig in s.signature()] == [1, 2]
    b = s.project_component("B")
    assert is_isomorphic(b, l_shape())
    with pytest.raises(SurfaceError):
        s.project_component("C")
    assert is_isomorphic(s, s.relabel(["X", "Y"]))
    assert not is_isomorphic(s, s.relabel(["X", "Y"]), match_labels=True)


def test_equality_and_digest_are_stable():
    a, b = l_shape(), l_shape()
    assert a == b and hash(a) == hash(b)
    assert a.digest() == b.digest()
    assert len(a.digest()) == 16
