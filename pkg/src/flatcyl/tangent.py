"""Linear models of T(M) and the cylinder calculus built on them.

A model is a real subspace ``T_R`` of H^1(X, Sigma; K) in the canonical
basis; the complex tangent space is its complexification, so it is closed
under multiplication by i and ``dim_C T = dim T_R``.  Twists are
parameterized as ``sum t_i c_i I(alpha_i)``, so the standard twist is
``t = m`` (the moduli).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactalg import FieldElem, Subspace, parse_elem
from .flow import Decomposition
from .homology import Homology


class InvalidModel(ValueError):
    pass


class InvalidInput(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


MAX_CYLINDERS = 12


@dataclass
class TangentModel:
    space: Subspace  # real subspace T_R of K^n
    homology: Homology
    kind: str = "user"

    @property
    def dim(self) -> int:
        return self.space.dim

    def contains_real(self, v: Sequence[FieldElem]) -> bool:
        return self.space.contains(list(v))

    def contains(self, xi) -> bool:
        """Membership of a Vec2-valued (complex) cocycle."""
        return self.space.contains([x[0] for x in xi]) and self.space.contains([x[1] for x in xi])

    def check(self) -> None:
        xs, ys = self.homology.hol()
        if not (self.space.contains(xs) and self.space.contains(ys)):
            raise InvalidModel("model does not contain the holonomy of the surface")

    def to_json(self) -> dict:
        return {
            "basis_hash": self.homology.basis_hash(),
            "kind": self.kind,
            "equations": [[str(x) for x in row] for row in self.space.equations()],
        }


def stratum_tangent(h: Homology) -> TangentModel:
    return TangentModel(Subspace.full(h.dim, h.surface.d), h, "stratum")


def model_from_equations(h: Homology, equations, kind: str = "user") -> TangentModel:
    d = h.surface.d
    rows = [[x if isinstance(x, FieldElem) else parse_elem(x, d) for x in row] for row in equations]
    for r in rows:
        if len(r) != h.dim:
            raise InvalidModel(f"equation of length {len(r)}, expected {h.dim}")
    m = TangentModel(Subspace.from_equations(rows, h.dim, d), h, kind)
    m.check()
    return m


def model_from_span(h: Homology, vectors, kind: str = "user") -> TangentModel:
    m = TangentModel(Subspace(vectors, h.dim, h.surface.d), h, kind)
    m.check()
    return m


def load_model(h: Homology, data: dict) -> TangentModel:
    if data.get("basis_hash") not in (None, h.basis_hash()):
        raise InvalidModel("model was written for a different basis")
    if data.get("kind") == "stratum":
        return stratum_tangent(h)
    return model_from_equations(h, data["equations"], data.get("kind", "user"))


def gl2_orbit_model(h: Homology) -> TangentModel:
    """span(Re omega, Im omega): the tangent space of a Teichmueller curve."""
    xs, ys = h.hol()
    return model_from_span(h, [xs, ys], "teichmueller-curve")


# ---------------------------------------------------------------------------
# cylinder classes and twists


def core_classes(h: Homology, decomp: Decomposition) -> list[list[int]]:
    return [h.chain(c.core_chain) for c in decomp.cylinders]


def core_duals(h: Homology, decomp: Decomposition) -> list[list[int]]:
    return [h.dual_cocycle(c.core_exits) for c in decomp.cylinders]


def m_parallel_classes(model: TangentModel, decomp: Decomposition):
    """Partition cylinders into M-parallel classes; also returns the ratio table."""
    h = model.homology
    alphas = core_classes(h, decomp)
    basis = model.space.basis()
    cyls = decomp.cylinders
    n = len(cyls)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    ratios = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = cyls[i].lam / cyls[j].lam
            ok = all(h.evaluate(xi, alphas[i]) == c * h.evaluate(xi, alphas[j]) for xi in basis)
            if ok:
                ratios[(i, j)] = c
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    classes: dict[int, list[int]] = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    return sorted(classes.values()), ratios


def twist_matrix(h: Homology, decomp: Decomposition, cls: Sequence[int]) -> list[list[FieldElem]]:
    """n x k matrix whose columns are c_i I(alpha_i) (scalar part; the phase is the direction)."""
    duals = core_duals(h, decomp)
    cols = [[decomp.cylinders[i].lam * x for x in duals[i]] for i in cls]
    return [[col[r] for col in cols] for r in range(h.dim)]


@dataclass
class TwistSpace:
    cls: list[int]
    space: Subspace  # in t-coordinates
    moduli: list[FieldElem]
    in_standard_plus_rel: bool
    rel_kernel_dim: int

    @property
    def dim(self) -> int:
        return self.space.dim

    def moduli_ratios(self) -> list[FieldElem]:
        return [m / self.moduli[0] for m in self.moduli]

    def to_json(self) -> dict:
        return {
            "class": self.cls,
            "dim": self.dim,
            "basis": self.space.to_json(),
            "moduli": [str(m) for m in self.moduli],
            "moduli_ratios_rational": all(r.is_rational() for r in self.moduli_ratios()),
            "within_standard_plus_rel": self.in_standard_plus_rel,
        }


def twist_space(model: TangentModel, decomp: Decomposition, cls: Sequence[int]) -> TwistSpace:
    h = model.homology
    cls = list(cls)
    k = len(cls)
    mat = twist_matrix(h, decomp, cls)
    space = model.space.preimage(mat, k)
    moduli = [decomp.cylinders[i].modulus for i in cls]
    if not space.contains(moduli):
        raise InvalidModel("the standard twist of this class leaves the model")
    image = space.image(mat, h.dim)
    rel = h.p_kernel().intersect(model.space)
    std = [sum((row[c] * moduli[c] for c in range(k)), h.surface.zero()) for row in mat]
    allowed = Subspace([std], h.dim, h.surface.d) + rel
    return TwistSpace(cls, space, moduli, allowed.contains_subspace(image), rel.dim)


def twist_cocycle_scalar(h: Homology, decomp: Decomposition, t: dict[int, FieldElem]) -> list[FieldElem]:
    """sum t_i c_i I(alpha_i) as scalar coordinates (multiply by the direction for the complex cocycle)."""
    duals = core_duals(h, decomp)
    out = [h.surface.zero()] * h.dim
    for i, ti in t.items():
        w = ti * decomp.cylinders[i].lam
        out = [o + w * x for o, x in zip(out, duals[i])]
    return out


# ---------------------------------------------------------------------------
# recognizable twists


@dataclass
class STConfig:
    S1: list[FieldElem]
    S2: list[Fraction]

    @classmethod
    def make(cls, s1, s2, d: int = 1) -> STConfig:
        s1 = [x if isinstance(x, FieldElem) else parse_elem(x, d) for x in s1]
        s2 = [Fraction(x) for x in s2]
        if not s1 or not s2:
            raise InvalidInput("S1 and S2 must be nonempty")
        if any(x.sign() <= 0 for x in s1):
            raise InvalidInput("circumference ratios must be positive")
        if any(x == 0 for x in s2):
            raise InvalidInput("S2 must not contain 0")
        closed = list(dict.fromkeys(s1 + [x.inverse() for x in s1]))
        return cls(closed, list(dict.fromkeys(s2)))

    @classmethod
    def load(cls, data: dict, d: int = 1) -> STConfig:
        return cls.make(data["S1"], data["S2"], d)


def recognizability_equations(circumferences, moduli, cfg: STConfig) -> list[list[Fraction]]:
    """All coefficient vectors f, supported on S1-compatible subsets with entries
    in +-S2, such that sum f_i m_i = 0."""
    n = len(moduli)
    if n > MAX_CYLINDERS:
        raise BudgetExceeded(f"{n} cylinders exceeds the budget of {MAX_CYLINDERS}")
    s1 = set(cfg.S1)
    compat = [[i == j or (circumferences[i] / circumferences[j]) in s1 for j in range(n)] for i in range(n)]
    coeffs = [Fraction(0)] + sorted({c for x in cfg.S2 for c in (x, -x)})
    half = n // 2
    left, right = list(range(half)), list(range(half, n))

    def part(idx):
        out: dict = {}
        for f in itertools.product(coeffs, repeat=len(idx)):
            supp = [i for i, c in zip(idx, f) if c]
            if any(not compat[a][b] for a, b in itertools.combinations(supp, 2)):
                continue
            val = sum((moduli[i] * c for i, c in zip(idx, f) if c), moduli[0] * 0)
            out.setdefault(val, []).append((f, supp))
        return out

    lp, rp = part(left), part(right)
    eqs = []
    for val, fl in lp.items():
        fr = rp.get(-val)
        if not fr:
            continue
        for f1, s1_ in fl:
            for f2, s2_ in fr:
                if not (s1_ or s2_):
                    continue
                if any(not compat[a][b] for a in s1_ for b in s2_):
                    continue
                eqs.append(list(f1) + list(f2))
    return eqs


def is_recognizable_data(circumferences, moduli, t, cfg: STConfig) -> bool:
    zero = moduli[0] * 0
    for f in recognizability_equations(circumferences, moduli, cfg):
        if sum((ti * c for ti, c in zip(t, f) if c), zero) != 0:
            return False
    return True


def recognizable_span_data(circumferences, moduli, cfg: STConfig) -> Subspace:
    d = moduli[0].d
    eqs = [[FieldElem(c, 0, d) for c in f] for f in recognizability_equations(circumferences, moduli, cfg)]
    return Subspace.from_equations(eqs, len(moduli), d)


def _cyl_data(decomp: Decomposition):
    return [c.lam for c in decomp.cylinders], [c.modulus for c in decomp.cylinders]


def is_recognizable(decomp: Decomposition, t, cfg: STConfig) -> bool:
    c, m = _cyl_data(decomp)
    t = [x if isinstance(x, FieldElem) else parse_elem(x, decomp.surface.d) for x in t]
    if len(t) != len(c):
        raise InvalidInput(f"{len(t)} twist coefficients for {len(c)} cylinders")
    return is_recognizable_data(c, m, t, cfg)


def recognizable_span(decomp: Decomposition, cfg: STConfig) -> Subspace:
    c, m = _cyl_data(decomp)
    return recognizable_span_data(c, m, cfg)


def recognizable_cocycles(h: Homology, decomp: Decomposition, cfg: STConfig) -> Subspace:
    """The recognizable span as scalar cocycles sum t_i c_i I(alpha_i)."""
    span = recognizable_span(decomp, cfg)
    vecs = [twist_cocycle_scalar(h, decomp, dict(enumerate(b))) for b in span.basis()]
    return Subspace(vecs, h.dim, h.surface.d)


# ---------------------------------------------------------------------------
# rank and field of definition


def rel_kernel(model: TangentModel) -> Subspace:
    return model.homology.p_kernel().intersect(model.space)


def rank(model: TangentModel) -> int:
    pdim = model.dim - rel_kernel(model).dim
    if pdim % 2:
        raise InvalidModel(f"dim p(T) = {pdim} is odd")
    return pdim // 2


def field_of_definition(model: TangentModel) -> int:
    """1 for Q, otherwise the d of Q[sqrt d]."""
    sp = model.space
    if sp.is_rational() or sp.conjugate() == sp:
        return 1
    return sp.d


def field_name(d: int) -> str:
    return "Q" if d == 1 else f"Q[sqrt{d}]"


# ---------------------------------------------------------------------------
# homologous subsets


@dataclass
class HomSubsets:
    I: list[int]
    I_prime: list[int]
    J: list[int]


def verify_hom_subsets(h: Homology, alphas, a, a_prime, betas, b, j0: int) -> HomSubsets:
    """Search subsets with sum_I alpha = sum_I' alpha + sum_J beta in H_1, j0 in J.

    ``alphas`` and ``betas`` are closed chains (lists of half-edges) of
    parallel, consistently oriented curves; coefficients must be positive.
    """
    n, m = len(alphas), len(betas)
    if len(a) != n or len(a_prime) != n or len(b) != m:
        raise InvalidInput("coefficient lengths do not match the curves")
    if not 0 <= j0 < m:
        raise InvalidInput("j0 out of range")
    if any(Fraction(x) <= 0 for x in list(a) + list(a_prime) + list(b)):
        raise InvalidInput("all coefficients must be positive")
    av = [h.chain(x) for x in alphas]
    bv = [h.chain(x) for x in betas]
    for x in alphas + betas:
        if not h.is_closed(x):
            raise InvalidInput("curves must be closed")
    hol = h.hol_vec()
    periods = [h.evaluate(hol, v) for v in av + bv]
    ref = periods[0]
    for p in periods:
        if not ref.cross(p).is_zero() or ref.dot(p).sign() <= 0:
            raise InvalidInput("curves are not parallel and consistently oriented")
    dim = h.dim
    lhs = [sum(Fraction(a[i]) * av[i][k] - Fraction(a_prime[i]) * av[i][k] for i in range(n)) for k in range(dim)]
    rhs = [sum(Fraction(b[j]) * bv[j][k] for j in range(m)) for k in range(dim)]
    if lhs != rhs:
        raise InvalidInput("the stated homology relation does not hold")
    diffs: dict[tuple, tuple] = {}
    for mask in range(1 << n):
        for mask2 in range(1 << n):
            v = tuple(
                sum(av[i][k] for i in range(n) if mask >> i & 1) - sum(av[i][k] for i in range(n) if mask2 >> i & 1)
                for k in range(dim)
            )
            diffs.setdefault(v, (mask, mask2))
    others = [j for j in range(m) if j != j0]
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            J = sorted((j0,) + extra)
            target = tuple(sum(bv[j][k] for j in J) for k in range(dim))
            if target in diffs:
                mask, mask2 = diffs[target]
                res = HomSubsets(
                    [i for i in range(n) if mask >> i & 1], [i for i in range(n) if mask2 >> i & 1], J
                )
                lens = [p.dot(ref) for p in periods]
                total = sum(lens[:n], lens[0] * 0)
                for j in range(m):
                    if lens[n + j] > total:
                        raise AssertionError("circumference bound violated")
                return res
    raise AssertionError("no homologous subsets found")


def dumps_model(model: TangentModel) -> str:
    return json.dumps(model.to_json(), sort_keys=True)
