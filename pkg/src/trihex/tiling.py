"""Trihexagonal tiling model: tiles, adjacency, point location.

Hexagon centers sit at 2*Lambda, which makes every tile edge have length one.
A hexagon is addressed by its center (a LatticeVec with even coordinates); a
triangle by the sorted triple of centers of the three hexagons around it.
Triangle corners are the pairwise midpoints of those centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .exact import QSqrt3, Vec2
from .lattice import LatticeVec

# Vertex offsets of a hexagon from its center: unit vectors at angles
# 0, 60, ..., 300 degrees, in Lambda coordinates (counterclockwise).
VERTEX_DIRS = (
    LatticeVec(-1, -1),  # +v0      at   0 deg
    LatticeVec(0, -1),   # -v2      at  60 deg
    LatticeVec(1, 0),    # +v1      at 120 deg
    LatticeVec(1, 1),    # -v0      at 180 deg
    LatticeVec(0, 1),    # +v2      at 240 deg
    LatticeVec(-1, 0),   # -v1      at 300 deg
)


def half_lattice_point(s: LatticeVec, exact: bool = True) -> Vec2:
    """Plane coordinates of s/2 for a Lambda vector s."""
    if exact:
        return Vec2(QSqrt3(-(s.m + s.n), 0, 4), QSqrt3(0, s.m - s.n, 4))
    return Vec2(-(s.m + s.n) / 4.0, (s.m - s.n) * math.sqrt(3.0) / 4.0)


@dataclass(frozen=True)
class Hexagon:
    center: LatticeVec  # coordinates are even

    @property
    def kind(self) -> str:
        return "hexagon"

    def anchor(self) -> LatticeVec:
        return self.center

    def anchor_point(self, exact: bool = True) -> Vec2:
        if exact:
            return self.center.to_vec2()
        return Vec2(*self.center.to_floats())


@dataclass(frozen=True)
class Triangle:
    centers: tuple[LatticeVec, LatticeVec, LatticeVec]  # sorted triple

    @property
    def kind(self) -> str:
        return "triangle_up" if self.pointing_up() else "triangle_down"

    def anchor(self) -> LatticeVec:
        """Sum of the three adjacent hexagon centers (3x the centroid)."""
        a, b, c = self.centers
        return a + b + c

    def anchor_point(self, exact: bool = True) -> Vec2:
        s = self.anchor()
        if exact:
            return Vec2(QSqrt3(-(s.m + s.n), 0, 6), QSqrt3(0, s.m - s.n, 6))
        x, y = s.to_floats()
        return Vec2(x / 3.0, y / 3.0)

    def pointing_up(self) -> bool:
        # Corner k is (ci+cj)/2; its height is proportional to m-n of the
        # pair sum.  An upward triangle has a single highest corner (apex).
        a, b, c = self.centers
        ys = [(u + v).m - (u + v).n for u, v in ((a, b), (a, c), (b, c))]
        return ys.count(max(ys)) == 1


Tile = Union[Hexagon, Triangle]


def make_triangle(c1: LatticeVec, c2: LatticeVec, c3: LatticeVec) -> Triangle:
    trip = sorted([c1, c2, c3], key=lambda v: (v.m, v.n))
    return Triangle((trip[0], trip[1], trip[2]))


@lru_cache(maxsize=100_000)
def _triangle_corner_order(t: Triangle) -> tuple[tuple[int, int], ...]:
    """Counterclockwise corner order as index pairs into t.centers."""
    pairs = [(0, 1), (0, 2), (1, 2)]
    pts = [half_lattice_point(t.centers[i] + t.centers[j], True) for i, j in pairs]
    if (pts[1] - pts[0]).cross(pts[2] - pts[0]).sign() < 0:
        pairs = [pairs[0], pairs[2], pairs[1]]
    return tuple(pairs)


def triangle_vertices(t: Triangle, exact: bool = True) -> list[Vec2]:
    return [
        half_lattice_point(t.centers[i] + t.centers[j], exact)
        for i, j in _triangle_corner_order(t)
    ]


def hexagon_vertices(h: Hexagon, exact: bool = True) -> list[Vec2]:
    c = h.center
    if exact:
        return [(c + u).to_vec2() for u in VERTEX_DIRS]
    return [Vec2(*(c + u).to_floats()) for u in VERTEX_DIRS]


@lru_cache(maxsize=100_000)
def _tile_vertices_exact(t: Tile) -> tuple[Vec2, ...]:
    if isinstance(t, Hexagon):
        return tuple(hexagon_vertices(t, True))
    return tuple(triangle_vertices(t, True))


def tile_vertices(t: Tile, exact: bool = True) -> list[Vec2]:
    if exact:
        return list(_tile_vertices_exact(t))
    if isinstance(t, Hexagon):
        return hexagon_vertices(t, False)
    return triangle_vertices(t, False)


def neighbor(t: Tile, edge: int) -> Tile:
    """Tile across edge `edge` (edges join vertex k to vertex k+1, ccw)."""
    if isinstance(t, Hexagon):
        u1 = VERTEX_DIRS[edge % 6]
        u2 = VERTEX_DIRS[(edge + 1) % 6]
        c = t.center
        return make_triangle(c, c + u1.scale(2), c + u2.scale(2))
    order = _triangle_corner_order(t)
    i1, j1 = order[edge % 3]
    i2, j2 = order[(edge + 1) % 3]
    common = set((i1, j1)) & set((i2, j2))
    return Hexagon(t.centers[common.pop()])


class VertexHit(Exception):
    """Raised when a point sits exactly on a tiling vertex."""


def _center_guess(x: float, y: float) -> tuple[int, int]:
    """Approximate Lambda coordinates (2M, 2N) of the nearest hexagon
    center: center = 2M v1 + 2N v2."""
    s3 = math.sqrt(3.0)
    mm = (y / s3 - x) / 2.0
    nn = (-y / s3 - x) / 2.0
    return round(mm), round(nn)


def _sign_of(v, tol: float) -> int:
    if isinstance(v, QSqrt3):
        return v.sign()
    if v > tol:
        return 1
    if v < -tol:
        return -1
    return 0


def point_in_convex(p: Vec2, verts: list[Vec2], tol: float = 0.0) -> str:
    """'in', 'edge', 'vertex' or 'out' for a ccw convex polygon.

    Exact when both inputs are exact; `tol` only affects float inputs.
    """
    n = len(verts)
    on_edge = False
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        sgn = _sign_of((b - a).cross(p - a), tol)
        if sgn < 0:
            return "out"
        if sgn == 0:
            lo = _sign_of((p - a).dot(b - a), tol)
            hi = _sign_of((p - b).dot(a - b), tol)
            if lo == 0 or hi == 0:
                return "vertex"
            if lo > 0 and hi > 0:
                on_edge = True
    return "edge" if on_edge else "in"


def locate(p: Vec2, tol: float = 1e-12) -> Tile:
    """Containing tile of p.  Edge points belong to the hexagon side;
    tiling vertices raise VertexHit."""
    exact = p.is_exact
    m0, n0 = _center_guess(float(p.x), float(p.y))
    centers = [
        LatticeVec(2 * (m0 + dm), 2 * (n0 + dn))
        for dm in (-1, 0, 1)
        for dn in (-1, 0, 1)
    ]
    x, y = float(p.x), float(p.y)
    centers.sort(key=lambda c: (c.to_floats()[0] - x) ** 2 + (c.to_floats()[1] - y) ** 2)
    for c in centers[:4]:
        h = Hexagon(c)
        where = point_in_convex(p, tile_vertices(h, exact), tol)
        if where == "vertex":
            raise VertexHit(p)
        if where in ("in", "edge"):
            return h
    seen = set()
    for c in centers[:4]:
        h = Hexagon(c)
        for e in range(6):
            t = neighbor(h, e)
            if t in seen:
                continue
            seen.add(t)
            where = point_in_convex(p, tile_vertices(t, exact), tol)
            if where == "vertex":
                raise VertexHit(p)
            if where in ("in", "edge"):
                return t
    raise ValueError(f"point ({x}, {y}) not located in any tile")
