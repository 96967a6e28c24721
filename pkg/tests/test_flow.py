from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catalog import ORIGAMIS, surfaces, vec
from flatcyl.exactalg import FieldElem
from flatcyl.fixtures import golden_l, l_shape, square_tiled, three_cylinders, torus
from flatcyl.flow import decompose, direction, shortest_saddle_connections
from oracles import decomposition_profile, lattice_cylinders, primitive_directions, saddle_connections


@st.composite
def origamis(draw):
    n = draw(st.integers(1, 7))
    r = draw(st.permutations(range(n)))
    u = draw(st.permutations(range(n)))
    seen, todo = {0}, [0]
    while todo:
        k = todo.pop()
        for nxt in (r[k], u[k]):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    if len(seen) != n:
        from hypothesis import reject

        reject()
    return list(r), list(u)


@settings(max_examples=40, deadline=None)
@given(origamis(), st.sampled_from(primitive_directions(4)))
def test_random_origamis_match_lattice_oracle(ru, pq):
    r, u = ru
    p, q = pq
    dec = decompose(square_tiled(r, u), vec(p, q))
    assert dec.periodic
    assert decomposition_profile(dec) == lattice_cylinders(r, u, p, q)


@pytest.mark.parametrize("name", sorted(surfaces()))
def test_cylinders_fill_the_surface(name):
    s, d = surfaces()[name]
    dec = decompose(s, d)
    assert dec.periodic
    assert sum((c.area for c in dec.cylinders), s.zero()) == s.area()
    for c in dec.cylinders:
        assert c.area * c.area == c.circumference2 * c.height2
        assert c.modulus * c.modulus * c.circumference2 == c.height2
        assert s.zero() <= c.twist < c.lam
        assert sum((dec.saddle_connections[n].lam for n in c.bottom), s.zero()) == c.lam
        assert sum((dec.saddle_connections[n].lam for n in c.top), s.zero()) == c.lam


@pytest.mark.parametrize("name", sorted(surfaces()))
def test_canonical_cylinder_order(name):
    s, d = surfaces()[name]
    cyls = decompose(s, d).cylinders
    keys = [(c.lam, c.modulus) for c in cyls]
    assert keys == sorted(keys)
    assert [c.index for c in cyls] == list(range(len(cyls)))


def test_every_saddle_connection_bounds_two_cylinders():
    s, d = surfaces()["three_cylinders"]
    dec = decompose(s, d)
    tops = Counter(n for c in dec.cylinders for n in c.top)
    bottoms = Counter(n for c in dec.cylinders for n in c.bottom)
    assert set(tops) == set(bottoms) == set(range(len(dec.saddle_connections)))
    assert set(tops.values()) == set(bottoms.values()) == {1}


def test_l_shape_horizontal():
    dec = decompose(l_shape(), vec(1, 0))
    assert [(str(c.lam), str(c.modulus)) for c in dec.cylinders] == [("1", "1"), ("2", "1/2")]


def test_golden_l_moduli_are_equal():
    s = golden_l()
    dec = decompose(s, vec(1, 0, 5))
    assert len(dec.cylinders) == 2
    a, b = dec.cylinders
    assert a.modulus == b.modulus
    assert not a.modulus.is_rational()


def test_three_cylinder_data():
    dec = decompose(three_cylinders(), vec(1, 0))
    assert [(str(c.lam), str(c.modulus)) for c in dec.cylinders] == [("1", "1"), ("1", "2"), ("40", "1")]


def test_irrational_circumference_is_reported_as_none():
    dec = decompose(torus(), vec(1, 2))
    (c,) = dec.cylinders
    assert c.circumference is None
    assert c.circumference2 == 5
    assert c.height2 == Fraction(1, 5)


def test_budget_exhaustion_is_undetermined():
    dec = decompose(square_tiled(*ORIGAMIS["twelve"]), vec(7, 9), max_crossings=3)
    assert not dec.periodic
    assert dec.status == "undetermined"
    assert dec.reason
    assert dec.cylinders == []


def test_direction_normalization():
    assert direction(vec(Fraction(2, 3), Fraction(4, 3))) == vec(1, 2)
    assert direction(vec(-3, 0)) == vec(-1, 0)
    v = direction(vec(0, 1, 5) * FieldElem(1, 1, 5))
    assert v == vec(0, 1, 5)
    with pytest.raises(ValueError):
        direction(vec(0, 0))


def test_opposite_directions_give_the_same_cylinders():
    s = square_tiled(*ORIGAMIS["eierlegende"])
    a, b = decompose(s, vec(2, 1)), decompose(s, vec(-2, -1))
    assert decomposition_profile(a) == decomposition_profile(b)


@pytest.mark.parametrize("name,bound", [("L", 2), ("pair", 3), ("eierlegende", 2), ("torus", 5)])
def test_shortest_saddle_connections_match_lattice_count(name, bound):
    r, u = ORIGAMIS[name]
    found = shortest_saddle_connections(square_tiled(r, u), bound)
    expected = saddle_connections(r, u, bound)
    assert len(found) == len(expected)
    got = Counter((int(sc.hol[0].a), int(sc.hol[1].a)) for sc in found)
    want = Counter(v for _, v in expected)
    assert got == want


def test_shortest_on_l_shape():
    assert len(shortest_saddle_connections(square_tiled(*ORIGAMIS["L"]), 2)) == 24
    assert shortest_saddle_connections(l_shape(), 0) == []
