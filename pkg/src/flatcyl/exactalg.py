"""Exact arithmetic in Q and real quadratic fields Q[sqrt(d)], plus linear algebra.

Elements are immutable.  Python ints and Fractions are coerced into whatever
field the other operand lives in; two elements from different quadratic
fields never mix.
"""

from __future__ import annotations

import re
from fractions import Fraction

from gmpy2 import mpq
from math import isqrt
from typing import Iterable, Sequence

__all__ = [
    "FieldElem",
    "FieldMismatch",
    "Vec2",
    "Subspace",
    "DimensionMismatch",
    "parse_elem",
    "is_squarefree",
    "rref",
    "rank",
    "kernel",
    "solve",
    "mat_mul",
    "transpose",
]


class FieldMismatch(ValueError):
    """Operands belong to different quadratic fields."""


class DimensionMismatch(ValueError):
    pass


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def _frac_sqrt(q) -> mpq | None:
    if q < 0:
        return None
    rn, rd = isqrt(q.numerator), isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return mpq(rn, rd)
    return None


# rationals are stored as gmpy2 mpq, which is much faster than Fraction and
# compares and hashes equal to it
_Q = type(mpq())
_RATIONAL = (int, Fraction, _Q)
_ZERO = mpq(0)
_set = object.__setattr__


class FieldElem:
    """The real number a + b*sqrt(d) with rational a, b.

    ``d == 1`` is the rational field; there b is always zero.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        if type(a) is not _Q:
            a = mpq(a)
        if type(b) is not _Q:
            b = mpq(b)
        if d == 1 and b:
            a, b = a + b, _ZERO
        _set(self, "a", a)
        _set(self, "b", b)
        _set(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElem is immutable")

    # -- coercion -----------------------------------------------------------
    def _coerce(self, other) -> FieldElem:
        if isinstance(other, FieldElem):
            if other.d == self.d:
                return other
            if other.d == 1 and other.b == 0:
                return FieldElem(other.a, 0, self.d)
            if self.d == 1:
                # rational self meets a quadratic element: promote self instead
                raise _Promote(other.d)
            raise FieldMismatch(f"Q[sqrt({self.d})] vs Q[sqrt({other.d})]")
        if isinstance(other, _RATIONAL):
            return FieldElem(other, 0, self.d)
        return NotImplemented

    def _binary(self, other, op):
        if type(other) is FieldElem and other.d == self.d:
            return op(self, other)
        try:
            o = self._coerce(other)
        except _Promote as p:
            return op(FieldElem(self.a, 0, p.d), other)
        if o is NotImplemented:
            return NotImplemented
        return op(self, o)

    def in_field(self, d: int) -> FieldElem:
        if d == self.d:
            return self
        if self.b != 0:
            raise FieldMismatch(f"Q[sqrt({self.d})] element is not in Q[sqrt({d})]")
        return FieldElem(self.a, 0, d)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if type(other) is FieldElem and other.d == self.d:
            return _add(self, other)
        return self._binary(other, _add)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is FieldElem and other.d == self.d:
            return _sub(self, other)
        return self._binary(other, _sub)

    def __rsub__(self, other):
        return self._binary(other, lambda x, y: _sub(y, x))

    def __mul__(self, other):
        if type(other) is FieldElem and other.d == self.d:
            return _mul(self, other)
        return self._binary(other, _mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda x, y: x * y.inverse())

    def __rtruediv__(self, other):
        return self._binary(other, lambda x, y: y * x.inverse())

    def __neg__(self):
        return _make(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = FieldElem(1, 0, self.d), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def norm(self) -> mpq:
        return self.a * self.a - self.d * self.b * self.b

    def conjugate(self) -> FieldElem:
        return FieldElem(self.a, -self.b, self.d)

    def inverse(self) -> FieldElem:
        if self.is_zero():
            raise ZeroDivisionError("division by zero in field")
        if self.b == 0:
            return FieldElem(1 / self.a, 0, self.d)
        n = self.norm()
        return FieldElem(self.a / n, -self.b / n, self.d)

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with d*b^2
        if a * a > self.d * b * b:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def __eq__(self, other):
        if type(other) is FieldElem:
            if not self.b and not other.b:
                return self.a == other.a
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, _RATIONAL):
            return not self.b and self.a == other
        return NotImplemented

    def _cmp(self, other) -> int:
        if type(other) is FieldElem:
            if not self.b and not other.b:
                x, y = self.a, other.a
                return (x > y) - (x < y)
        elif isinstance(other, _RATIONAL) and not self.b:
            return (self.a > other) - (self.a < other)
        diff = self - other
        if diff is NotImplemented:
            return NotImplemented
        return diff.sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return not self.is_zero()

    def __float__(self):
        return float(self.a) + float(self.b) * self.d**0.5

    def sqrt(self) -> FieldElem | None:
        """Exact square root in the same field, or None if there is none."""
        if self.sign() < 0:
            return None
        if self.is_zero():
            return self
        a, b, d = self.a, self.b, self.d
        if b == 0:
            r = _frac_sqrt(a)
            if r is not None:
                return FieldElem(r, 0, d)
            if d != 1:
                r = _frac_sqrt(a / d)
                if r is not None:
                    return FieldElem(0, r, d)
            return None
        disc = _frac_sqrt(a * a - d * b * b)
        if disc is None:
            return None
        for x2 in ((a + disc) / 2, (a - disc) / 2):
            x = _frac_sqrt(x2)
            if x:
                root = FieldElem(x, b / (2 * x), d)
                return root if root.sign() > 0 else -root
        return None

    # -- serialization ------------------------------------------------------
    def __str__(self):
        a = _fmt(self.a)
        if self.b == 0:
            return a
        bs = _fmt(abs(self.b))
        tail = "r" if bs == "1" else f"{bs}*r"
        sign = "-" if self.b < 0 else "+"
        if self.a == 0:
            return tail if sign == "+" else f"-{tail}"
        return f"{a}{sign}{tail}"

    def __repr__(self):
        if self.d == 1:
            return f"FieldElem({_fmt(self.a)})"
        return f"FieldElem({str(self)}, d={self.d})"


def _make(a: mpq, b: mpq, d: int) -> FieldElem:
    # trusted constructor: a, b are mpq and b == 0 when d == 1
    e = _new(FieldElem)
    _set_a(e, a)
    _set_b(e, b)
    _set_d(e, d)
    return e


_new = object.__new__
_set_a = FieldElem.a.__set__
_set_b = FieldElem.b.__set__
_set_d = FieldElem.d.__set__


def _mul(x: FieldElem, y: FieldElem) -> FieldElem:
    if not x.b and not y.b:
        return _make(x.a * y.a, _ZERO, x.d)
    return _make(x.a * y.a + x.d * x.b * y.b, x.a * y.b + x.b * y.a, x.d)


def _add(x: FieldElem, y: FieldElem) -> FieldElem:
    b = x.b + y.b if (x.b or y.b) else _ZERO
    return _make(x.a + y.a, b, x.d)


def _sub(x: FieldElem, y: FieldElem) -> FieldElem:
    b = x.b - y.b if (x.b or y.b) else _ZERO
    return _make(x.a - y.a, b, x.d)


class _Promote(Exception):
    def __init__(self, d):
        self.d = d


def _fmt(q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_RAT = r"[+-]?\d+(?:/\d+)?"
_ELEM_RE = re.compile(
    rf"^\s*(?:(?P<a>{_RAT})(?=$|\s*[+-]))?\s*(?:(?P<bs>[+-])?\s*(?:(?P<b>\d+(?:/\d+)?)\s*\*\s*)?r)?\s*$"
)


def parse_elem(text, d: int = 1) -> FieldElem:
    """Parse "p/q", "p/q+r/s*r", "r", "-2*r" ... into Q[sqrt(d)]."""
    if isinstance(text, FieldElem):
        return text.in_field(d) if text.d != d else text
    if isinstance(text, bool):
        raise ValueError("not a field element")
    if isinstance(text, _RATIONAL):
        return FieldElem(text, 0, d)
    s = str(text).strip()
    if not s:
        raise ValueError("empty field element")
    m = _ELEM_RE.match(s)
    if m is None or (m.group("a") is None and "r" not in s):
        raise ValueError(f"bad field element {text!r}")
    a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
    b = Fraction(0)
    if "r" in s:
        if d == 1:
            raise FieldMismatch(f"{text!r} uses sqrt(d) in a rational context")
        b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
        if m.group("bs") == "-":
            b = -b
    return FieldElem(a, b, d)


class Vec2(tuple):
    """Planar vector / complex number x + iy with field coordinates."""

    __slots__ = ()

    def __new__(cls, x, y=None):
        if y is None:
            x, y = x
        if not isinstance(x, FieldElem):
            x = FieldElem(x, 0, y.d if isinstance(y, FieldElem) else 1)
        if not isinstance(y, FieldElem):
            y = FieldElem(y, 0, x.d)
        if x.d != y.d:
            if x.b == 0:
                x = x.in_field(y.d)
            elif y.b == 0:
                y = y.in_field(x.d)
            else:
                raise FieldMismatch("mixed fields in Vec2")
        return tuple.__new__(cls, (x, y))

    @property
    def x(self) -> FieldElem:
        return self[0]

    @property
    def y(self) -> FieldElem:
        return self[1]

    def __add__(self, o):
        return _vec(self[0] + o[0], self[1] + o[1])

    def __sub__(self, o):
        return _vec(self[0] - o[0], self[1] - o[1])

    def __neg__(self):
        return _vec(-self[0], -self[1])

    def __mul__(self, k):
        return _vec(self[0] * k, self[1] * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return _vec(self[0] / k, self[1] / k)

    def cross(self, o) -> FieldElem:
        return self[0] * o[1] - self[1] * o[0]

    def dot(self, o) -> FieldElem:
        return self[0] * o[0] + self[1] * o[1]

    def norm2(self) -> FieldElem:
        return self.dot(self)

    def rot90(self) -> Vec2:
        """Multiplication by i."""
        return _vec(-self[1], self[0])

    def cmul(self, o) -> Vec2:
        """Complex multiplication."""
        return Vec2(self[0] * o[0] - self[1] * o[1], self[0] * o[1] + self[1] * o[0])

    def is_zero(self) -> bool:
        return self[0].is_zero() and self[1].is_zero()

    def __repr__(self):
        return f"Vec2({self[0]}, {self[1]})"


def _vec(x: FieldElem, y: FieldElem) -> Vec2:
    # trusted constructor: both coordinates already live in one field
    return _tuple_new(Vec2, (x, y))


_tuple_new = tuple.__new__


# ---------------------------------------------------------------------------
# matrices are lists of rows of FieldElem


def _zero_like(rows) -> FieldElem:
    for r in rows:
        for x in r:
            return FieldElem(0, 0, x.d)
    return FieldElem(0)


def transpose(m: Sequence[Sequence[FieldElem]], ncols: int | None = None) -> list[list[FieldElem]]:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def mat_mul(a, b):
    if a and b and len(a[0]) != len(b):
        raise DimensionMismatch(f"{len(a[0])} vs {len(b)}")
    bt = transpose(b)
    zero = _zero_like(a) if a else FieldElem(0)
    return [[sum((x * y for x, y in zip(row, col)), zero) for col in bt] for row in a]


def rref(rows: Iterable[Sequence[FieldElem]], ncols: int) -> tuple[list[list[FieldElem]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    for r in m:
        if len(r) != ncols:
            raise DimensionMismatch(f"row of length {len(r)} in {ncols}-column matrix")
    pivots: list[int] = []
    lead = 0
    for c in range(ncols):
        piv = None
        for i in range(lead, len(m)):
            if not m[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        m[lead], m[piv] = m[piv], m[lead]
        inv = m[lead][c].inverse()
        m[lead] = [x * inv for x in m[lead]]
        for i in range(len(m)):
            if i != lead and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[lead])]
        pivots.append(c)
        lead += 1
        if lead == len(m):
            break
    return m[:lead], pivots


def rank(rows, ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def kernel(rows, ncols: int, d: int = 1) -> list[list[FieldElem]]:
    """Basis of {x : rows @ x = 0}."""
    red, pivots = rref(rows, ncols)
    if red:
        d = red[0][0].d
    free = [c for c in range(ncols) if c not in pivots]
    zero, one = FieldElem(0, 0, d), FieldElem(1, 0, d)
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, p in zip(red, pivots):
            v[p] = -r[f]
        basis.append(v)
    return basis


def solve(a, b, ncols: int):
    """One solution x of a @ x = b (b a column list), or None if inconsistent."""
    aug = [list(r) + [bi] for r, bi in zip(a, b)]
    red, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    d = red[0][0].d if red else 1
    x = [FieldElem(0, 0, d)] * ncols
    for r, p in zip(red, pivots):
        x[p] = r[ncols]
    return x


class Subspace:
    """A linear subspace of K^n stored by its canonical reduced row basis."""

    __slots__ = ("n", "rows", "pivots", "d")

    def __init__(self, rows: Iterable[Sequence[FieldElem]], n: int, d: int | None = None):
        red, piv = rref(rows, n)
        if d is None:
            d = red[0][0].d if red else 1
        self.n = n
        self.rows = tuple(tuple(r) for r in red)
        self.pivots = tuple(piv)
        self.d = d

    @classmethod
    def full(cls, n: int, d: int = 1) -> Subspace:
        z, o = FieldElem(0, 0, d), FieldElem(1, 0, d)
        return cls([[o if i == j else z for j in range(n)] for i in range(n)], n, d)

    @classmethod
    def zero(cls, n: int, d: int = 1) -> Subspace:
        return cls([], n, d)

    @classmethod
    def from_equations(cls, eqs, n: int, d: int = 1) -> Subspace:
        return cls(kernel(list(eqs), n, d), n, d)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def basis(self) -> list[list[FieldElem]]:
        return [list(r) for r in self.rows]

    def _check(self, other: Subspace):
        if self.n != other.n:
            raise DimensionMismatch(f"ambient {self.n} vs {other.n}")

    def canonicalize(self) -> Subspace:
        return Subspace(self.rows, self.n, self.d)

    def contains(self, v: Sequence[FieldElem]) -> bool:
        if len(v) != self.n:
            raise DimensionMismatch(f"vector of length {len(v)} in ambient {self.n}")
        return rank(list(self.rows) + [list(v)], self.n) == self.dim

    def contains_subspace(self, other: Subspace) -> bool:
        self._check(other)
        return all(self.contains(r) for r in other.rows)

    def __add__(self, other: Subspace) -> Subspace:
        self._check(other)
        return Subspace(list(self.rows) + list(other.rows), self.n, self.d)

    def annihilator(self) -> Subspace:
        """Covectors vanishing on self (standard pairing)."""
        return Subspace(kernel(list(self.rows), self.n, self.d), self.n, self.d)

    def equations(self) -> list[list[FieldElem]]:
        return self.annihilator().basis()

    def intersect(self, other: Subspace) -> Subspace:
        self._check(other)
        eqs = self.equations() + other.equations()
        return Subspace(kernel(eqs, self.n, self.d), self.n, self.d)

    def preimage(self, m: Sequence[Sequence[FieldElem]], src_dim: int) -> Subspace:
        """{x in K^src_dim : m @ x in self}, m an (n x src_dim) matrix."""
        if len(m) != self.n:
            raise DimensionMismatch(f"matrix has {len(m)} rows, ambient is {self.n}")
        eqs = mat_mul(self.equations(), m) if self.dim < self.n else []
        return Subspace(kernel(eqs, src_dim, self.d), src_dim, self.d)

    def image(self, m: Sequence[Sequence[FieldElem]], dst_dim: int) -> Subspace:
        """{m @ x : x in self}."""
        vecs = [[sum((a * b for a, b in zip(row, v)), FieldElem(0, 0, self.d)) for row in m] for v in self.rows]
        return Subspace(vecs, dst_dim, self.d)

    def coordinates(self, v: Sequence[FieldElem]) -> list[FieldElem] | None:
        """Coefficients of v in the canonical basis, or None if v is not in self."""
        if not self.rows:
            return [] if all(x.is_zero() for x in v) else None
        coeffs = [v[p] for p in self.pivots]
        for j in range(self.n):
            s = sum((c * r[j] for c, r in zip(coeffs, self.rows)), FieldElem(0, 0, self.d))
            if s != v[j]:
                return None
        return coeffs

    def is_rational(self) -> bool:
        return all(x.b == 0 for r in self.rows for x in r)

    def conjugate(self) -> Subspace:
        return Subspace([[x.conjugate() for x in r] for r in self.rows], self.n, self.d)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, n={self.n})"

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.rows]
