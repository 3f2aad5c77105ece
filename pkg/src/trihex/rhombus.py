"""Discrete model: rhombus decomposition, the exit map, and the section
return on short diagonals (a circle rotation with a 2*Lambda cocycle).

Every hexagon H_c splits into rhombi R^i_c (i mod 3) with vertices
c, c-v(i+1), c+v(i), c-v(i-1); edges carry labels 1..4 counterclockwise from
the edge leaving c toward -v(i+1).  All rhombi are presented in the frame of
R^0_0 ("local" coordinates), where the short diagonal runs from (0,0) to
(1,0) and directions of travel sit at angles in [pi/3, 2pi/3].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .exact import HALF, QSqrt3, SQRT3_HALF, Vec2
from .lattice import LatticeVec
from .tiling import Hexagon
from .tracer import Segment, TraceResult

# v0, v1, v2 in Lambda coordinates
V = (LatticeVec(-1, -1), LatticeVec(1, 0), LatticeVec(0, 1))

# model rhombus corners: c, c-v1, c+v0, c-v2 for (i, c) = (0, 0)
W0 = Vec2(QSqrt3(0), QSqrt3(0))
W1 = Vec2(HALF, -SQRT3_HALF)
W2 = Vec2(QSqrt3(1), QSqrt3(0))
W3 = Vec2(HALF, SQRT3_HALF)
MODEL = (W0, W1, W2, W3)
# edge k (1-indexed) runs from MODEL[k-1] to MODEL[k % 4]

PLUS_V1 = Vec2(-HALF, SQRT3_HALF)
PLUS_V2 = Vec2(-HALF, -SQRT3_HALF)

_MODEL_F = tuple(v.to_float() for v in MODEL)
_PLUS_V1_F = PLUS_V1.to_float()
_PLUS_V2_F = PLUS_V2.to_float()


def _model(exact: bool):
    return MODEL if exact else _MODEL_F


@dataclass(frozen=True)
class RhombusCoord:
    i: int
    c: LatticeVec  # hexagon center, even Lambda coordinates

    def __post_init__(self):
        object.__setattr__(self, "i", self.i % 3)

    def vertices(self, exact: bool = True) -> list[Vec2]:
        """Plane coordinates of c, c-v(i+1), c+v(i), c-v(i-1)."""
        c = self.c
        lat = [
            c,
            c - V[(self.i + 1) % 3],
            c + V[self.i],
            c - V[(self.i - 1) % 3],
        ]
        if exact:
            return [v.to_vec2() for v in lat]
        return [Vec2(*v.to_floats()) for v in lat]

    def local_to_plane(self, p: Vec2) -> Vec2:
        """Model-frame point to tiling coordinates (rotate by i*2pi/3 about
        the hexagon center)."""
        from .exact import apply_mat2, rotation_sixth

        rot = rotation_sixth(2 * self.i, exact=p.is_exact)
        base = self.c.to_vec2() if p.is_exact else Vec2(*self.c.to_floats())
        return base + apply_mat2(rot, p)

    def plane_to_local(self, p: Vec2) -> Vec2:
        from .exact import apply_mat2, rotation_sixth

        rot = rotation_sixth(-2 * self.i, exact=p.is_exact)
        base = self.c.to_vec2() if p.is_exact else Vec2(*self.c.to_floats())
        return apply_mat2(rot, p - base)


@dataclass(frozen=True)
class SectionPoint:
    rhombus: RhombusCoord
    x: object  # QSqrt3 or float in (0, 1) along the short diagonal
    branch: int = 0  # index of the hexagon-direction the orbit uses here

    def __post_init__(self):
        object.__setattr__(self, "branch", self.branch % 3)


class SingularOrbit(Exception):
    """Trajectory through a rhombus vertex (flow undefined)."""


@dataclass
class ExitStep:
    rhombus: RhombusCoord       # next rhombus
    point: Vec2                 # entry point, local frame (on edge 1 or 2)
    edge: int                   # exit edge label: 3 or 4
    deck: LatticeVec            # hexagon-center increment (element of 2Lambda)
    intermediate: RhombusCoord  # rhombus crossed by the physical trajectory
    exit_point: Vec2            # exit point, local frame of the old rhombus
    flow_param: object          # ray parameter spent inside the old rhombus


def _local_direction(theta_or_vec, exact: bool) -> Vec2:
    if isinstance(theta_or_vec, Vec2):
        return theta_or_vec
    if exact:
        raise ValueError("exact mode needs an exact direction vector")
    return Vec2(math.cos(theta_or_vec), math.sin(theta_or_vec))


def _sign(v, tol: float = 0.0) -> int:
    if isinstance(v, QSqrt3):
        return v.sign()
    if v > tol:
        return 1
    if v < -tol:
        return -1
    return 0


def _ray_segment(p: Vec2, u: Vec2, a: Vec2, b: Vec2, tol: float = 0.0):
    """Forward crossing of the ray p + t*u with segment [a, b]: returns
    (t, s) with s in [0, 1], or None."""
    e = b - a
    denom = u.cross(e)
    if _sign(denom, tol) == 0:
        return None
    t = (a - p).cross(e) / denom
    s = (a - p).cross(u) / denom
    if _sign(t, tol) <= 0:
        return None
    ss = _sign(s, tol)
    se = _sign(s - (QSqrt3(1) if isinstance(s, QSqrt3) else 1.0), tol)
    if ss < 0 or se > 0:
        return None
    if ss == 0 or se == 0:
        raise SingularOrbit(f"exit at a rhombus vertex ({float(a.x)},{float(a.y)})-({float(b.x)},{float(b.y)})")
    return t, s


def exit_map(
    r: RhombusCoord,
    p: Vec2,
    direction: Union[float, Vec2],
    tol: float = 1e-9,
) -> ExitStep:
    """One application of the exit map of the discrete model.

    `p` is in the model frame; `direction` is the angle against v_i (or a
    local vector).  The trajectory leaves through edge 3 or 4; the entry
    point in the next rhombus is the rotation by -2pi/3 about the shared
    vertex, which in model frames is the translation by v2 (edge 3) or
    -v1 (edge 4).
    """
    exact = p.is_exact
    u = _local_direction(direction, exact)
    tol = 0.0 if exact else tol
    if _sign(u.y, tol) <= 0:
        raise ValueError("direction must have angle in (0, pi) against v_i")
    w0, _, w2, w3 = _model(exact)
    plus_v1 = PLUS_V1 if exact else _PLUS_V1_F
    plus_v2 = PLUS_V2 if exact else _PLUS_V2_F
    hit3 = _ray_segment(p, u, w2, w3, tol)
    hit4 = _ray_segment(p, u, w3, w0, tol)
    if hit3 is not None and (hit4 is None or hit3[0] < hit4[0]):
        t, _ = hit3
        q = Vec2(p.x + u.x * t, p.y + u.y * t)
        nxt = RhombusCoord(r.i - 1, r.c + V[r.i].scale(2))
        return ExitStep(
            rhombus=nxt,
            point=q + plus_v2,
            edge=3,
            deck=V[r.i].scale(2),
            intermediate=RhombusCoord(r.i + 1, nxt.c),
            exit_point=q,
            flow_param=t,
        )
    if hit4 is not None:
        t, _ = hit4
        q = Vec2(p.x + u.x * t, p.y + u.y * t)
        nxt = RhombusCoord(r.i - 1, r.c - V[(r.i - 1) % 3].scale(2))
        return ExitStep(
            rhombus=nxt,
            point=q - plus_v1,
            edge=4,
            deck=-V[(r.i - 1) % 3].scale(2),
            intermediate=RhombusCoord(r.i + 1, r.c),
            exit_point=q,
            flow_param=t,
        )
    raise SingularOrbit("no exit through edge 3 or 4")


@dataclass
class CocycleStep:
    next: SectionPoint
    deck: LatticeVec
    time_surface: float
    time_tiling: float
    param_surface: object  # exact ray parameter between section hits
    param_tiling: object   # param_surface plus the inserted detour
    edge: int


def _chord_exit(p: Vec2, u: Vec2, sides: list[tuple[Vec2, Vec2]], tol: float):
    """First forward crossing of the ray with any of the given segments."""
    best = None
    for a, b in sides:
        hit = _ray_segment(p, u, a, b, tol)
        if hit is not None and (best is None or hit[0] < best):
            best = hit[0]
    if best is None:
        raise SingularOrbit("chord leaves through a vertex")
    return best


# triangle across edge 3 of the model rhombus
_TRI3 = (Vec2(QSqrt3(1), QSqrt3(0)), Vec2(HALF, SQRT3_HALF), Vec2(QSqrt3(3, 0, 2), SQRT3_HALF))
# sibling rhombus across edge 4 (image of the model under rotation by 2pi/3)
_SIB = (W0, W3, Vec2(-HALF, SQRT3_HALF), Vec2(QSqrt3(-1), QSqrt3(0)))
_TRI3_F = tuple(v.to_float() for v in _TRI3)
_SIB_F = tuple(v.to_float() for v in _SIB)


def section_return(s: SectionPoint, direction: Union[float, Vec2], tol: float = 1e-9) -> CocycleStep:
    """First return of the straight-line flow to the union of short
    diagonals, with the deck translation and both clocks.

    The tiling clock adds the detour through an equilateral triangle and its
    mirror image, so 0 <= time_tiling - time_surface <= 2.
    """
    exact = isinstance(s.x, QSqrt3)
    u = _local_direction(direction, exact)
    zero = QSqrt3(0) if exact else 0.0
    p = Vec2(s.x, zero)
    step = exit_map(s.rhombus, p, u, tol)
    q = step.point
    # flow from the entry point (below the diagonal) up to y = 0
    t2 = -q.y / u.y
    x_new = q.x + u.x * t2
    param_surface = step.flow_param + t2
    speed = u.norm()

    # detour chord: through the adjacent triangle (edge 3) or the sibling
    # rhombus (edge 4); the other inserted piece is its mirror image.
    tri3 = _TRI3 if exact else _TRI3_F
    sib = _SIB if exact else _SIB_F
    if step.edge == 3:
        ue = Vec2(-HALF, SQRT3_HALF) if exact else Vec2(-0.5, math.sqrt(3.0) / 2)
        k = u.dot(ue) * 2
        u_t = Vec2(u.x - ue.x * k, u.y - ue.y * k)
        chord = _chord_exit(step.exit_point, u_t, [(tri3[1], tri3[2]), (tri3[2], tri3[0])], tol)
    else:
        chord = _chord_exit(
            step.exit_point, u, [(sib[1], sib[2]), (sib[2], sib[3])], tol
        )
    param_tiling = param_surface + chord * 2

    nxt = SectionPoint(step.rhombus, x_new, s.branch - 1)
    return CocycleStep(
        next=nxt,
        deck=step.deck,
        time_surface=float(param_surface) * speed,
        time_tiling=float(param_tiling) * speed,
        param_surface=param_surface,
        param_tiling=param_tiling,
        edge=step.edge,
    )


def itinerary(s: SectionPoint, direction: Union[float, Vec2], n_steps: int, tol: float = 1e-9) -> list[RhombusCoord]:
    """Rhombi visited by the physical trajectory over n_steps returns,
    including the rhombus the flow crosses between section hits."""
    exact = isinstance(s.x, QSqrt3)
    zero = QSqrt3(0) if exact else 0.0
    out = [s.rhombus]
    cur = s
    u = _local_direction(direction, exact)
    for _ in range(n_steps):
        step = exit_map(cur.rhombus, Vec2(cur.x, zero), u, tol)
        out.append(step.intermediate)
        out.append(step.rhombus)
        t2 = -step.point.y / u.y
        cur = SectionPoint(step.rhombus, step.point.x + u.x * t2, cur.branch - 1)
    return out


def rhombus_of(p: Vec2, hexagon: Hexagon, tol: float = 1e-12) -> RhombusCoord:
    """The rhombus of H_c containing p.  Spoke points [c, c-v_k] are owned
    by the rhombus whose edge 1 they form; the center is rejected."""
    from .tiling import point_in_convex

    exact = p.is_exact
    cpt = hexagon.anchor_point(exact)
    rel = p - cpt
    if _sign(rel.x, tol) == 0 and _sign(rel.y, tol) == 0:
        raise SingularOrbit("hexagon center is a singular point")
    for i in range(3):
        r = RhombusCoord(i, hexagon.center)
        verts = r.vertices(exact)
        where = point_in_convex(p, verts, tol if not exact else 0.0)
        if where == "in":
            return r
        if where in ("edge", "vertex"):
            # on a spoke: edge 1 is [verts[0], verts[1]]
            e = verts[1] - verts[0]
            cr = _sign(e.cross(rel), tol)
            along = _sign(rel.dot(e), tol)
            if cr == 0 and along > 0:
                return r
    raise ValueError("point not inside the hexagon")


# ---------------------------------------------------------------------------
# extraction of the rhombus picture from a direct trace


def _spoke_crossings(seg: Segment, hexagon: Hexagon) -> list[tuple[object, int]]:
    """Parameters where the segment crosses the three internal spokes
    [c, c-v_k] of its hexagon."""
    exact = seg.start.is_exact
    c = hexagon.anchor_point(exact)
    d = seg.end - seg.start
    hits = []
    for k in range(3):
        vk = V[k].to_vec2() if exact else Vec2(*V[k].to_floats())
        a = c
        b = Vec2(c.x - vk.x, c.y - vk.y)
        e = b - a
        denom = d.cross(e)
        if _sign(denom) == 0:
            continue
        t = (a - seg.start).cross(e) / denom
        s = (a - seg.start).cross(d) / denom
        if _sign(t) > 0 and _sign(t - (QSqrt3(1) if exact else 1.0)) < 0:
            if _sign(s) > 0 and _sign(s - (QSqrt3(1) if exact else 1.0)) < 0:
                hits.append((t, k))
    hits.sort(key=lambda h: float(h[0]))
    return hits


def trace_rhombus_sequence(tr: TraceResult) -> list[RhombusCoord]:
    """Rhombi visited by a traced trajectory, in order."""
    out: list[RhombusCoord] = []
    exact = tr.exact
    for seg in tr.segments:
        if not isinstance(seg.tile, Hexagon):
            continue
        cuts = _spoke_crossings(seg, seg.tile)
        params = [QSqrt3(0) if exact else 0.0] + [t for t, _ in cuts] + [
            QSqrt3(1) if exact else 1.0
        ]
        d = seg.end - seg.start
        for a, b in zip(params[:-1], params[1:]):
            mid = (a + b) / 2
            pt = Vec2(seg.start.x + d.x * mid, seg.start.y + d.y * mid)
            out.append(rhombus_of(pt, seg.tile))
    return out


def trace_section_hits(tr: TraceResult) -> list[tuple[float, RhombusCoord, float]]:
    """Crossings of a traced trajectory with the short diagonals [c, c+v_i]:
    (cumulative ray parameter, rhombus, diagonal coordinate x)."""
    hits = []
    exact = tr.exact
    one = QSqrt3(1) if exact else 1.0
    speed = tr.direction.norm()
    for seg in tr.segments:
        if not isinstance(seg.tile, Hexagon):
            continue
        c = seg.tile.anchor_point(exact)
        d = seg.end - seg.start
        param_len = d.norm() / speed  # segment extent in ray-parameter units
        for i in range(3):
            vi = V[i].to_vec2() if exact else Vec2(*V[i].to_floats())
            e = vi
            denom = d.cross(e)
            if _sign(denom) == 0:
                continue
            a = c
            t = (a - seg.start).cross(e) / denom
            s = (a - seg.start).cross(d) / denom
            if _sign(t) >= 0 and _sign(t - one) < 0 and _sign(s) > 0 and _sign(s - one) < 0:
                hits.append(
                    (
                        float(seg.t_start) + float(t) * param_len,
                        RhombusCoord(i, seg.tile.center),
                        float(s),
                    )
                )
    hits.sort(key=lambda h: h[0])
    return hits
