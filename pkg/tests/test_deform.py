import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catalog import surfaces, vec
from flatcyl.deform import (
    DegenerateTriangle,
    StaleDecomposition,
    add_cocycle,
    make_path,
    shear_cylinders,
    standard_twist,
    stretch_cocycle,
    stretch_cylinders,
    twist_cocycle,
    validity_box,
)
from flatcyl.exactalg import Vec2
from flatcyl.fixtures import l_shape, three_cylinders, torus
from flatcyl.flow import decompose
from flatcyl.homology import Homology
from flatcyl.surface import GL2, is_isomorphic

HORIZONTAL = ["torus", "L", "tall_L", "marked_torus", "pair", "rebirth", "three_cylinders"]
small = st.fractions(min_value=-3, max_value=3, max_denominator=12)


def test_zero_cocycle_is_identity():
    s = l_shape()
    h = Homology(s)
    assert add_cocycle(s, [Vec2((s.zero(), s.zero()))] * h.dim, h) == s


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=Fraction(-1, 2), max_value=3, max_denominator=10))
def test_adding_a_multiple_of_omega_rescales(t):
    s = l_shape()
    h = Homology(s)
    out = add_cocycle(s, [v * t for v in h.hol_vec()], h)
    assert is_isomorphic(out, s.apply_gl2(GL2.diag(1 + t, 1 + t)))


@settings(max_examples=15, deadline=None)
@given(small)
def test_horocycle_as_cocycle(t):
    s = l_shape()
    h = Homology(s)
    xs, ys = h.hol()
    xi = [Vec2((y * t, s.zero())) for y in ys]
    assert is_isomorphic(add_cocycle(s, xi, h), s.apply_gl2(GL2.u(t)))


@pytest.mark.parametrize("name", HORIZONTAL)
def test_shearing_every_cylinder_is_the_horocycle_flow(name):
    s, d = surfaces()[name]
    dec = decompose(s, d)
    t = Fraction(2, 7)
    out = shear_cylinders(s, dec, range(len(dec.cylinders)), t)
    assert is_isomorphic(out, s.apply_gl2(GL2.u(t)))


@pytest.mark.parametrize("name", HORIZONTAL)
def test_stretching_every_cylinder_is_vertical_scaling(name):
    s, d = surfaces()[name]
    dec = decompose(s, d)
    out = stretch_cylinders(s, dec, range(len(dec.cylinders)), Fraction(1, 3))
    assert is_isomorphic(out, s.apply_gl2(GL2.diag(1, Fraction(4, 3))))


@pytest.mark.parametrize("name", sorted(surfaces()))
def test_stretch_routes_agree(name):
    s, d = surfaces()[name]
    h = Homology(s)
    dec = decompose(s, d)
    rng = random.Random(name)
    for _ in range(3):
        cyls = sorted(rng.sample(range(len(dec.cylinders)), rng.randint(1, len(dec.cylinders))))
        unit = stretch_cocycle(h, dec, {i: s.elem(1) for i in cyls})
        t = validity_box(s, unit, h) * Fraction(rng.randint(-99, 99), 100)
        assert is_isomorphic(
            stretch_cylinders(s, dec, cyls, t),
            add_cocycle(s, [v * t for v in unit], h),
        )


def test_large_shear_needs_retriangulation_and_still_agrees():
    s = three_cylinders()
    h = Homology(s)
    dec = decompose(s, vec(1, 0))
    t = Fraction(37, 5)
    unit = standard_twist(h, dec, [2])
    assert t > validity_box(s, unit, h)
    out = add_cocycle(s, [v * t for v in unit], h)
    assert is_isomorphic(out, shear_cylinders(s, dec, [2], t))


def test_twist_cocycle_is_linear():
    s = l_shape()
    h = Homology(s)
    dec = decompose(s, vec(1, 0))
    one = twist_cocycle(h, dec, {0: s.elem(1)})
    two = twist_cocycle(h, dec, {1: s.elem(1)})
    both = twist_cocycle(h, dec, {0: s.elem(2), 1: s.elem(-3)})
    assert both == [a * 2 - b * 3 for a, b in zip(one, two)]
    assert stretch_cocycle(h, dec, {0: s.elem(1)}) == [v.rot90() for v in one]


@pytest.mark.parametrize("name", sorted(surfaces()))
def test_validity_box_keeps_the_triangulation(name):
    s, d = surfaces()[name]
    h = Homology(s)
    rng = random.Random(7)
    xi = [Vec2((s.elem(Fraction(rng.randint(-5, 5), 3)), s.elem(Fraction(rng.randint(-5, 5), 3)))) for _ in range(h.dim)]
    cap = validity_box(s, xi, h)
    assert 0 < cap <= 1
    for t in (cap, -cap):
        assert add_cocycle(s, [v * t for v in xi], h).gluing == s.gluing


def test_collapsing_deformation_raises():
    s = torus()
    h = Homology(s)
    with pytest.raises(DegenerateTriangle):
        add_cocycle(s, [v * -1 for v in h.hol_vec()], h)


def test_wrong_length_and_stale_inputs():
    s = l_shape()
    h = Homology(s)
    with pytest.raises(ValueError):
        add_cocycle(s, h.hol_vec()[:-1], h)
    with pytest.raises(StaleDecomposition):
        add_cocycle(torus(), h.hol_vec(), h)
    dec = decompose(torus(), vec(1, 0))
    with pytest.raises(StaleDecomposition):
        shear_cylinders(s, dec, [0], 1)
    with pytest.raises(ValueError):
        stretch_cylinders(torus(), dec, [0], -1)


def test_linear_path():
    s = l_shape()
    h = Homology(s)
    path = make_path(s, h.hol_vec(), h)
    assert path.sample(0) is s
    assert is_isomorphic(path.sample(1), s.apply_gl2(GL2.diag(2, 2)))
    with pytest.raises(ValueError):
        path.sample(2)
