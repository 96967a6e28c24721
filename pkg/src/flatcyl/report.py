"""Flat pictures of surfaces and cylinder decompositions.

Only the report path uses matplotlib; all computation stays exact and the
figures are drawn from float images of exact coordinates.
"""

from __future__ import annotations

from collections import deque
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from .flow import Decomposition, vertex_positions  # noqa: E402
from .surface import Surface  # noqa: E402

GAP = 0.5


def _f(p) -> tuple[float, float]:
    return float(p[0]), float(p[1])


def unfold(s: Surface) -> dict[int, tuple[float, float]]:
    """Planar offset of each triangle, developing each component along a dual spanning tree."""
    offset: dict[int, tuple[float, float]] = {}
    shift_x = 0.0
    for k in range(len(s.labels)):
        tris = [t for t in range(s.num_triangles) if s.tri_component[t] == k]
        root = tris[0]
        offset[root] = (shift_x, 0.0)
        queue = deque([root])
        while queue:
            t = queue.popleft()
            pt = vertex_positions(s.triangles[t])
            for i in range(3):
                u, j = s.gluing[(t, i)]
                if u in offset:
                    continue
                # vertex i of t coincides with vertex j+1 of u
                pu = vertex_positions(s.triangles[u])
                ox, oy = offset[t]
                a = _f(pt[i])
                b = _f(pu[(j + 1) % 3])
                offset[u] = (ox + a[0] - b[0], oy + a[1] - b[1])
                queue.append(u)
        xs = [offset[t][0] + float(p[0]) for t in tris for p in vertex_positions(s.triangles[t])]
        shift_x = max(xs) + GAP
    return offset


def _clip(poly, d, lo, hi):
    """Part of a convex polygon with lo <= cross(d, p) <= hi."""

    def level(p):
        return d[0] * p[1] - d[1] * p[0]

    def cut(pts, keep):
        out = []
        for n, p in enumerate(pts):
            q = pts[(n + 1) % len(pts)]
            lp, lq = keep(p), keep(q)
            if lp >= 0:
                out.append(p)
            if (lp >= 0) != (lq >= 0):
                r = lp / (lp - lq)
                out.append((p[0] + r * (q[0] - p[0]), p[1] + r * (q[1] - p[1])))
        return out

    pts = cut(poly, lambda p: level(p) - lo)
    return cut(pts, lambda p: hi - level(p)) if pts else pts


def render_surface(s: Surface, path: str | Path, decomp: Decomposition | None = None, title: str | None = None) -> Path:
    """Draw the triangulation; with a decomposition, shade each cylinder in its own color."""
    path = Path(path)
    offset = unfold(s)
    fig, ax = plt.subplots(figsize=(6, 4))
    cmap = plt.get_cmap("tab20")
    if decomp is not None and decomp.periodic:
        d = _f(decomp.direction)
        for cyl in decomp.cylinders:
            color = cmap(cyl.index % 20)
            for n in cyl.strips:
                st = decomp.strips[n]
                tri = [_f(p) for p in vertex_positions(s.triangles[st.t])]
                part = _clip(tri, d, float(st.lo), float(st.hi))
                if len(part) >= 3:
                    ox, oy = offset[st.t]
                    ax.add_patch(Polygon([(x + ox, y + oy) for x, y in part], closed=True, color=color, alpha=0.55, lw=0))
    for t in range(s.num_triangles):
        ox, oy = offset[t]
        pts = [(x + ox, y + oy) for x, y in (_f(p) for p in vertex_positions(s.triangles[t]))]
        ax.add_patch(Polygon(pts, closed=True, fill=False, ec="0.3", lw=0.6))
    ax.autoscale_view()
    ax.set_aspect("equal")
    ax.set_axis_off()
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_cylinder_bars(decomp: Decomposition, path: str | Path) -> Path:
    """Bar chart of circumference and modulus per cylinder."""
    path = Path(path)
    idx = [c.index for c in decomp.cylinders]
    lam = [float(c.lam) for c in decomp.cylinders]
    mod = [float(c.modulus) for c in decomp.cylinders]
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(6, 2.5))
    a1.bar(idx, lam, color="tab:blue")
    a1.set_title("circumference / |direction|", fontsize=9)
    a2.bar(idx, mod, color="tab:orange")
    a2.set_title("modulus", fontsize=9)
    for a in (a1, a2):
        a.set_xlabel("cylinder")
        a.set_xticks(idx)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
