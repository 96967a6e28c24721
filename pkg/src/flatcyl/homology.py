"""Relative (co)homology of a triangulated translation surface.

Chains are integer vectors over the non-tree edges of a dual spanning tree;
cocycles are their values on those basis edges.  Every vertex is marked, so
H^1(X, Sigma) is the space of edge functions that sum to zero around each
triangle.
"""

from __future__ import annotations

import hashlib
from collections import deque
from typing import Iterable, Sequence

from .exactalg import FieldElem, Subspace, Vec2
from .surface import HalfEdge, Surface


class Homology:
    def __init__(self, surface: Surface):
        self.surface = s = surface
        self.edges: list[HalfEdge] = s.edges()
        self.edge_index: dict[HalfEdge, tuple[int, int]] = {}
        for k, h in enumerate(self.edges):
            self.edge_index[h] = (k, 1)
            self.edge_index[s.gluing[h]] = (k, -1)
        # deterministic dual spanning forest by BFS over triangles
        tree: set[int] = set()
        seen = [False] * s.num_triangles
        for root in range(s.num_triangles):
            if seen[root]:
                continue
            seen[root] = True
            queue = deque([root])
            while queue:
                t = queue.popleft()
                for i in range(3):
                    u, _ = s.gluing[(t, i)]
                    if not seen[u]:
                        seen[u] = True
                        tree.add(self.edge_index[(t, i)][0])
                        queue.append(u)
        self.basis: list[int] = [k for k in range(len(self.edges)) if k not in tree]
        self.dim = len(self.basis)
        self._reduce(tree)

    def _reduce(self, tree: set[int]) -> None:
        """Express every edge as an integer combination of basis edges mod boundaries."""
        s = self.surface
        n = self.dim
        rows: list[list[int] | None] = [None] * len(self.edges)
        for pos, k in enumerate(self.basis):
            v = [0] * n
            v[pos] = 1
            rows[k] = v
        unknown = [sum(1 for i in range(3) if self.edge_index[(t, i)][0] in tree) for t in range(s.num_triangles)]
        queue = deque(t for t in range(s.num_triangles) if unknown[t] == 1)
        while queue:
            t = queue.popleft()
            if unknown[t] != 1:
                continue
            missing = None
            acc = [0] * n
            for i in range(3):
                k, sg = self.edge_index[(t, i)]
                if rows[k] is None:
                    missing = (k, sg)
                else:
                    for j in range(n):
                        acc[j] += sg * rows[k][j]
            k, sg = missing
            # sg * e_k + acc = 0
            rows[k] = [-sg * a for a in acc]
            unknown[t] = 0
            for h in (s.gluing[(t, i)] for i in range(3)):
                if self.edge_index[h][0] == k:
                    u = h[0]
                    unknown[u] -= 1
                    if unknown[u] == 1:
                        queue.append(u)
        if any(r is None for r in rows):
            raise RuntimeError("dual tree reduction failed")
        self.R: list[list[int]] = rows  # type: ignore[assignment]

    # -- chains ---------------------------------------------------------------
    def half_edge_chain(self, h: HalfEdge) -> list[int]:
        k, sg = self.edge_index[h]
        return [sg * x for x in self.R[k]]

    def chain(self, half_edges: Iterable[HalfEdge]) -> list[int]:
        acc = [0] * self.dim
        for h in half_edges:
            k, sg = self.edge_index[h]
            for j, x in enumerate(self.R[k]):
                if x:
                    acc[j] += sg * x
        return acc

    def is_closed(self, half_edges: Sequence[HalfEdge]) -> bool:
        s = self.surface
        bal: dict[int, int] = {}
        for t, i in half_edges:
            a = s.vertex_of((t, i))
            b = s.vertex_of((t, (i + 1) % 3))
            bal[a] = bal.get(a, 0) - 1
            bal[b] = bal.get(b, 0) + 1
        return all(v == 0 for v in bal.values())

    # -- cocycles -------------------------------------------------------------
    def zero(self) -> list[FieldElem]:
        z = self.surface.zero()
        return [z] * self.dim

    def cocycle_from_half_edges(self, value) -> list:
        """Coordinates of the cocycle whose value on half-edge h is value(h)."""
        return [value(self.edges[k]) for k in self.basis]

    def edge_values(self, coords: Sequence) -> list:
        """Value of a cocycle on each canonical edge."""
        z = coords[0] * 0 if coords else self.surface.zero()
        out = []
        for row in self.R:
            acc = z
            for c, x in zip(coords, row):
                if x:
                    acc = acc + c * x
            out.append(acc)
        return out

    def half_edge_layer(self, coords: Sequence) -> list[list]:
        """Cocycle as a per-triangle list of values, laid out like ``surface.triangles``."""
        vals = self.edge_values(coords)
        return [[vals[self.edge_index[(t, i)][0]] * self.edge_index[(t, i)][1] for i in range(3)] for t in range(self.surface.num_triangles)]

    def evaluate(self, coords: Sequence, chain: Sequence[int]):
        acc = coords[0] * 0 if coords else self.surface.zero()
        for c, g in zip(coords, chain):
            if g:
                acc = acc + c * g
        return acc

    def hol(self) -> tuple[list[FieldElem], list[FieldElem]]:
        """The tautological cocycle split into real and imaginary parts."""
        s = self.surface
        xs = self.cocycle_from_half_edges(lambda h: s.hol(h)[0])
        ys = self.cocycle_from_half_edges(lambda h: s.hol(h)[1])
        return xs, ys

    def hol_vec(self) -> list[Vec2]:
        s = self.surface
        return self.cocycle_from_half_edges(s.hol)

    def dual_cocycle(self, exits: Iterable[HalfEdge]) -> list[int]:
        """Cocycle gamma -> (alpha . gamma) for a closed curve alpha given by the
        half-edges through which it leaves successive triangles."""
        vals = [0] * len(self.edges)
        for h in exits:
            k, sg = self.edge_index[h]
            vals[k] += sg
        return [vals[k] for k in self.basis]

    def vertex_coboundaries(self) -> list[list[int]]:
        """delta of each vertex indicator; these span ker(H^1(X,Sigma) -> H^1(X))."""
        s = self.surface
        out = []
        for v in range(s.num_vertices):
            vals = []
            for k in self.basis:
                t, i = self.edges[k]
                a = s.vertex_of((t, i))
                b = s.vertex_of((t, (i + 1) % 3))
                vals.append((1 if b == v else 0) - (1 if a == v else 0))
            out.append(vals)
        return out

    def p_kernel(self) -> Subspace:
        d = self.surface.d
        rows = [[FieldElem(x, 0, d) for x in r] for r in self.vertex_coboundaries()]
        return Subspace(rows, self.dim, d)

    def absolute_dim(self) -> int:
        return self.dim - self.p_kernel().dim

    def basis_hash(self) -> str:
        h = hashlib.sha256()
        h.update(self.surface.dumps().encode())
        h.update(repr([self.edges[k] for k in self.basis]).encode())
        return h.hexdigest()[:16]

    def basis_labels(self) -> list[str]:
        return [f"e{self.edges[k][0]}.{self.edges[k][1]}" for k in self.basis]


def expected_dim(surface: Surface) -> int:
    """sum over components of 2g + s - 1."""
    return sum(2 * sig.genus + sig.marked - 1 for sig in surface.signature())
