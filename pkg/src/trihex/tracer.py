"""Direct simulation of the refractive flow on the trihexagonal tiling.

A ray crossing a tile edge continues with its tangential component reversed
(refraction index -1): the new direction is the old one reflected across the
edge normal.  In exact mode every coordinate stays in Q(sqrt3), so recurrence
detection for lattice directions needs no tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .exact import QSqrt3, Vec2
from .lattice import LatticeVec
from .tiling import (
    Hexagon,
    Tile,
    Triangle,
    locate,
    neighbor,
    tile_vertices,
)

FLOAT_TOL = 1e-9


@dataclass
class RayState:
    pos: Vec2
    dir: Vec2
    tile: Tile
    sign: Optional[str] = None  # '+' ccw / '-' cw around hexagon centers


@dataclass
class Segment:
    start: Vec2
    end: Vec2
    tile: Tile
    t_start: object  # cumulative ray parameter (QSqrt3 or float)


@dataclass
class Crossing:
    point: Vec2
    edge_dir: Vec2  # unit vector along the crossed edge


@dataclass
class Periodic:
    period_time: float
    combinatorial_period: int
    period_param: object

    name = "Periodic"


@dataclass
class DriftPeriodic:
    shift: LatticeVec  # element of 2*Lambda
    period_time: float
    combinatorial_period: int
    period_param: object

    name = "DriftPeriodic"


@dataclass
class Singular:
    vertex: Vec2

    name = "Singular"


@dataclass
class Horizon:
    steps: int

    name = "Horizon"


Status = Union[Periodic, DriftPeriodic, Singular, Horizon]


@dataclass
class TraceResult:
    segments: list[Segment]
    crossings: list[Crossing]
    status: Status
    direction: Vec2
    lattice_direction: Optional[LatticeVec]
    sign: Optional[str]
    start: Vec2
    exact: bool
    path_length: float
    tile_counts: dict[str, int]

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.status, Periodic)

    @property
    def is_drift_periodic(self) -> bool:
        return isinstance(self.status, DriftPeriodic)


def direction_vector(direction: Union[LatticeVec, float], exact: bool) -> Vec2:
    if isinstance(direction, LatticeVec):
        if exact:
            return direction.to_vec2()
        return Vec2(*direction.to_floats())
    if exact:
        raise ValueError("Exact mode requires a lattice direction")
    return Vec2(math.cos(direction), math.sin(direction))


def _sign(v, tol: float) -> int:
    if isinstance(v, QSqrt3):
        return v.sign()
    if v > tol:
        return 1
    if v < -tol:
        return -1
    return 0


class _VertexAhead(Exception):
    def __init__(self, vertex: Vec2):
        self.vertex = vertex


def _advance(verts, pos: Vec2, d: Vec2, tol: float):
    """Exit point of the ray pos + t*d from a ccw convex tile.

    Returns (exit_point, edge_index, t).  Raises _VertexAhead when the ray
    hits a polygon vertex (exactly in exact mode, within tol otherwise).
    """
    n = len(verts)
    rel = [verts[i] - pos for i in range(n)]
    s = [d.cross(rel[i]) for i in range(n)]
    sg = [_sign(v, tol) for v in s]
    for i in range(n):
        if sg[i] == 0 and _sign(d.dot(rel[i]), tol) > 0:
            raise _VertexAhead(verts[i])
    for i in range(n):
        j = (i + 1) % n
        if sg[i] < 0 and sg[j] > 0:
            edge = verts[j] - verts[i]
            denom = s[j] - s[i]
            t = rel[i].cross(rel[j]) / denom
            exit_pos = Vec2(pos.x + d.x * t, pos.y + d.y * t)
            return exit_pos, i, t
    raise _VertexAhead(pos)  # degenerate: no transversal exit


def _state_key(tile: Tile, pos: Vec2, d: Vec2, exact: bool):
    rel = pos - tile.anchor_point(exact)
    if exact:
        return (tile.kind, rel.x, rel.y, d.x, d.y)
    return (
        tile.kind,
        round(rel.x, 9),
        round(rel.y, 9),
        round(d.x, 12),
        round(d.y, 12),
    )


def _anchor_shift(tile_then: Tile, tile_now: Tile) -> LatticeVec:
    delta = tile_now.anchor() - tile_then.anchor()
    if isinstance(tile_now, Triangle):
        if delta.m % 3 or delta.n % 3:
            raise AssertionError("triangle anchors differ by 3 * 2Lambda")
        delta = LatticeVec(delta.m // 3, delta.n // 3)
    return delta


def trace(
    start: Vec2,
    direction: Union[LatticeVec, float],
    max_steps: int = 100_000,
    exact: Optional[bool] = None,
    tol: float = FLOAT_TOL,
    keep_segments: bool = True,
) -> TraceResult:
    """Run the refractive flow from `start` until recurrence, a singularity
    or the step horizon.

    Periodicity is full state recurrence; drift-periodicity is recurrence up
    to a translation in 2*Lambda, whose shift is recorded.
    """
    if exact is None:
        exact = isinstance(direction, LatticeVec)
    lattice_dir = direction if isinstance(direction, LatticeVec) else None
    d = direction_vector(direction, exact)
    start = start if exact == start.is_exact else _convert_point(start, exact)
    speed = d.norm()

    tile = locate(start)
    pos = start
    t_param: object = QSqrt3(0) if exact else 0.0
    segments: list[Segment] = []
    crossings: list[Crossing] = []
    counts: dict[str, int] = {}
    seen: dict = {}
    sign: Optional[str] = None
    status: Optional[Status] = None
    adv_tol = 0.0 if exact else tol

    for step in range(1, max_steps + 1):
        verts = tile_vertices(tile, exact)
        if sign is None and isinstance(tile, Hexagon):
            cr = _sign((pos - tile.anchor_point(exact)).cross(d), adv_tol)
            if cr > 0:
                sign = "+"
            elif cr < 0:
                sign = "-"
        try:
            exit_pos, eidx, t = _advance(verts, pos, d, adv_tol)
        except _VertexAhead as hit:
            status = Singular(vertex=hit.vertex)
            break
        counts[tile.kind] = counts.get(tile.kind, 0) + 1
        if keep_segments:
            segments.append(Segment(pos, exit_pos, tile, t_param))
        t_param = t_param + t
        edge_dir = verts[(eidx + 1) % len(verts)] - verts[eidx]  # unit length
        if keep_segments:
            crossings.append(Crossing(exit_pos, edge_dir))
        # refract: reflect the direction across the edge normal
        k = d.dot(edge_dir) * 2
        d = Vec2(d.x - edge_dir.x * k, d.y - edge_dir.y * k)
        pos = exit_pos
        tile = neighbor(tile, eidx)

        key = _state_key(tile, pos, d, exact)
        prev = seen.get(key)
        if prev is not None:
            prev_step, prev_param, prev_tile = prev
            shift = _anchor_shift(prev_tile, tile)
            period_param = t_param - prev_param
            period_time = float(period_param) * speed
            comb = step - prev_step
            if shift.is_zero():
                status = Periodic(period_time, comb, period_param)
            else:
                status = DriftPeriodic(shift, period_time, comb, period_param)
            break
        seen[key] = (step, t_param, tile)
    if status is None:
        status = Horizon(steps=max_steps)

    return TraceResult(
        segments=segments,
        crossings=crossings,
        status=status,
        direction=d,
        lattice_direction=lattice_dir,
        sign=sign,
        start=start,
        exact=exact,
        path_length=float(t_param) * speed,
        tile_counts=counts,
    )


def _convert_point(p: Vec2, exact: bool) -> Vec2:
    if exact and not p.is_exact:
        raise ValueError("Exact mode requires an exact start point")
    return p.to_float()


def refract_step(state: RayState, tol: float = FLOAT_TOL) -> Union[RayState, Singular]:
    """One step of the flow: advance to the first edge and refract."""
    exact = state.pos.is_exact
    verts = tile_vertices(state.tile, exact)
    try:
        exit_pos, eidx, _ = _advance(verts, state.pos, state.dir, 0.0 if exact else tol)
    except _VertexAhead as hit:
        return Singular(vertex=hit.vertex)
    edge_dir = verts[(eidx + 1) % len(verts)] - verts[eidx]
    k = state.dir.dot(edge_dir) * 2
    new_dir = Vec2(state.dir.x - edge_dir.x * k, state.dir.y - edge_dir.y * k)
    return RayState(exit_pos, new_dir, neighbor(state.tile, eidx), state.sign)


def orientation_sign(state: RayState, tol: float = FLOAT_TOL) -> Union[str, Singular]:
    """'+' for counterclockwise travel around the hexagon center.

    Flows forward first when the state sits in a triangle.
    """
    s = state
    for _ in range(4):
        if isinstance(s.tile, Hexagon):
            exact = s.pos.is_exact
            cr = _sign((s.pos - s.tile.anchor_point(exact)).cross(s.dir), 0.0 if exact else tol)
            if cr == 0:
                return Singular(vertex=s.tile.anchor_point(exact))
            return "+" if cr > 0 else "-"
        s = refract_step(s, tol)
        if isinstance(s, Singular):
            return s
    raise AssertionError("no hexagon within two tiles of any state")


# ---------------------------------------------------------------------------
# folding


def _reflect_mat(e: Vec2):
    """Matrix of reflection across the direction of unit vector e."""
    two = 2 if e.is_exact else 2.0
    one = QSqrt3(1) if e.is_exact else 1.0
    xx = e.x * e.x * two - one
    xy = e.x * e.y * two
    yy = e.y * e.y * two - one
    return ((xx, xy), (xy, yy))


def _apply_affine(mat, b: Vec2, p: Vec2) -> Vec2:
    (a11, a12), (a21, a22) = mat
    return Vec2(a11 * p.x + a12 * p.y + b.x, a21 * p.x + a22 * p.y + b.y)


def fold(tr: TraceResult) -> tuple[list[Vec2], float]:
    """Apply the cumulative edge reflections to the trace.

    Returns the folded polyline points and the residual: the largest distance
    from a folded point to the line through the start in the launch direction
    (exactly zero in exact mode).
    """
    if len(tr.segments) < 1:
        raise ValueError("fold needs at least one segment")
    exact = tr.exact
    one = QSqrt3(1) if exact else 1.0
    zero = QSqrt3(0) if exact else 0.0
    mat = ((one, zero), (zero, one))
    b = Vec2(zero, zero)
    d0 = tr.segments[0].end - tr.segments[0].start
    p0 = tr.segments[0].start
    folded = [p0]
    worst = zero
    for seg, crossing in zip(tr.segments, tr.crossings):
        q = _apply_affine(mat, b, seg.end)
        folded.append(q)
        dev = abs(d0.cross(q - p0))
        if dev > worst:
            worst = dev
        # fold the tail of the trajectory across the crossed edge line
        rmat, a = _reflect_mat(crossing.edge_dir), crossing.point
        ra = _apply_affine(rmat, Vec2(zero, zero), a)
        rb = a - ra
        mat, b = _compose_affine(mat, b, rmat, rb)
    residual = float(worst) / d0.norm()
    return folded, residual


def _compose_affine(m1, b1: Vec2, m2, b2: Vec2):
    (a, bb), (c, dd) = m1
    (e, f), (g, h) = m2
    mat = (
        (a * e + bb * g, a * f + bb * h),
        (c * e + dd * g, c * f + dd * h),
    )
    off = Vec2(a * b2.x + bb * b2.y + b1.x, c * b2.x + dd * b2.y + b1.y)
    return mat, off


def drift_rate(tr: TraceResult) -> float:
    """Net displacement per unit time over the traced horizon."""
    if not tr.segments:
        return 0.0
    first = tr.segments[0].start.to_float()
    last = tr.segments[-1].end.to_float()
    if tr.path_length == 0:
        return 0.0
    return (last - first).norm() / tr.path_length


# ---------------------------------------------------------------------------
# excluded central triangles (Lemma on missed centers)


def _family_directions(theta: float) -> list[float]:
    return [theta, theta + 2 * math.pi / 3, theta - 2 * math.pi / 3]


def central_triangle(tri: Triangle, theta_std: float) -> Optional[list[Vec2]]:
    """The open central triangle of `tri` bounded by the three singular
    refracted segments through the adjacent hexagon centers, for flow
    direction family {theta_std, theta_std +- 2pi/3}.

    Returns its corners, or None when the construction degenerates (the
    three singular lines concur, as at theta = pi/2).
    """
    corners = triangle_vertices(tri, exact=False)
    lines = []
    for c_lat in tri.centers:
        cx, cy = c_lat.to_floats()
        c = Vec2(cx, cy)
        hexa = Hexagon(c_lat)
        # shared edge of the hexagon and tri
        shared = None
        for e in range(6):
            if neighbor(hexa, e) == tri:
                hv = tile_vertices(hexa, exact=False)
                shared = (hv[e], hv[(e + 1) % 6])
                break
        assert shared is not None
        a, bpt = shared
        edge = bpt - a
        found = None
        for phi in _family_directions(theta_std):
            d = Vec2(math.cos(phi), math.sin(phi))
            denom = edge.cross(d)
            if abs(denom) < 1e-12:
                continue
            # intersection of the full line through c in direction d with
            # the shared edge a + u*edge
            u = (c - a).cross(d) / denom
            if 1e-9 < u < 1 - 1e-9:
                q = Vec2(a.x + edge.x * u, a.y + edge.y * u)
                k = d.dot(edge) * 2
                d_in = Vec2(d.x - edge.x * k, d.y - edge.y * k)
                # orient the refracted direction into the triangle
                inward = Vec2(
                    (corners[0].x + corners[1].x + corners[2].x) / 3 - q.x,
                    (corners[0].y + corners[1].y + corners[2].y) / 3 - q.y,
                )
                if d_in.dot(inward) < 0:
                    d_in = Vec2(-d_in.x, -d_in.y)
                found = (q, d_in)
                break
        if found is None:
            return None
        lines.append(found)
    pts = []
    for i in range(3):
        (p1, d1) = lines[i]
        (p2, d2) = lines[(i + 1) % 3]
        denom = d1.cross(d2)
        if abs(denom) < 1e-12:
            return None
        t = (p2 - p1).cross(d2) / denom
        pts.append(Vec2(p1.x + d1.x * t, p1.y + d1.y * t))
    area2 = (pts[1] - pts[0]).cross(pts[2] - pts[0])
    if abs(area2) < 1e-12:
        return None
    if area2 < 0:
        pts[1], pts[2] = pts[2], pts[1]
    return pts


def excluded_family_up(theta_std: float) -> Optional[bool]:
    """Which triangle family keeps untouched centers for ccw flow at
    standardized angle theta_std: True = upward, False = downward,
    None at theta = pi/2 where no centers are missed."""
    if abs(theta_std - math.pi / 2) < 1e-12:
        return None
    return theta_std < math.pi / 2


def excluded_triangle_check(tr: TraceResult, theta_std: float, margin: float = 1e-9) -> bool:
    """True when no traced point enters the excluded open central triangle
    of any triangle tile of the excluded family."""
    up = excluded_family_up(theta_std)
    if up is None:
        return True
    cache: dict[Triangle, Optional[list[Vec2]]] = {}
    for seg in tr.segments:
        tile = seg.tile
        if not isinstance(tile, Triangle) or tile.pointing_up() != up:
            continue
        tri = cache.get(tile)
        if tile not in cache:
            tri = central_triangle(tile, theta_std)
            cache[tile] = tri
        if tri is None:
            continue
        if _segment_meets_triangle(seg.start.to_float(), seg.end.to_float(), tri, margin):
            return False
    return True


def point_excluded(q: Vec2, theta_std: float, margin: float = 1e-9) -> bool:
    """True when q lies inside the excluded central triangle of its tile."""
    up = excluded_family_up(theta_std)
    if up is None:
        return False
    tile = locate(q.to_float())
    if not isinstance(tile, Triangle) or tile.pointing_up() != up:
        return False
    tri = central_triangle(tile, theta_std)
    if tri is None:
        return False
    return _strictly_inside(q.to_float(), tri, margin)


def _segment_meets_triangle(a: Vec2, b: Vec2, tri: list[Vec2], margin: float) -> bool:
    """Whether the open segment (a, b) enters the open triangle: clip the
    segment parameter against the three interior half-planes."""
    lo, hi = 0.0, 1.0
    for i in range(3):
        p, q = tri[i], tri[(i + 1) % 3]
        fa = (q - p).cross(a - p) - margin
        fb = (q - p).cross(b - p) - margin
        if fa <= 0 and fb <= 0:
            return False
        if fa < 0 or fb < 0:
            t = fa / (fa - fb)
            if fa < 0:
                lo = max(lo, t)
            else:
                hi = min(hi, t)
        if lo >= hi:
            return False
    return True


def _strictly_inside(q: Vec2, tri: list[Vec2], margin: float) -> bool:
    for i in range(3):
        a, b = tri[i], tri[(i + 1) % 3]
        if (b - a).cross(q - a) <= margin:
            return False
    return True


# ---------------------------------------------------------------------------
# symmetry of closed trajectories


@dataclass
class Order3:
    center: Vec2

    name = "Order3"


@dataclass
class TranslationSym:
    shift: LatticeVec

    name = "Translation"


@dataclass
class NoSymmetry:
    name = "None"


def _period_segments(tr: TraceResult) -> list[Segment]:
    n = tr.status.combinatorial_period
    return tr.segments[-n:]


def _segment_set(segs, ndigits=7):
    out = set()
    for s in segs:
        a = s.start.to_float()
        b = s.end.to_float()
        pa = (round(a.x, ndigits), round(a.y, ndigits))
        pb = (round(b.x, ndigits), round(b.y, ndigits))
        out.add((pa, pb) if pa <= pb else (pb, pa))
    return out


def _rotate_set(segset, center: Vec2, sixths: int):
    c, s = math.cos(sixths * math.pi / 3), math.sin(sixths * math.pi / 3)
    out = set()
    for pa, pb in segset:
        pts = []
        for x, y in (pa, pb):
            dx, dy = x - center.x, y - center.y
            pts.append((round(center.x + c * dx - s * dy, 6), round(center.y + s * dx + c * dy, 6)))
        a, b = pts
        out.add((a, b) if a <= b else (b, a))
    return out


def _coarse(segset, ndigits=6):
    return {
        ((round(a[0], ndigits), round(a[1], ndigits)), (round(b[0], ndigits), round(b[1], ndigits)))
        for a, b in segset
    }


def symmetry_check(tr: TraceResult):
    """Order-3 rotation center for periodic traces; shift membership in
    {+-2v0, +-2v1, +-2v2} for drift-periodic ones."""
    status = tr.status
    if isinstance(status, DriftPeriodic):
        s = status.shift
        basis = {(-2, -2), (2, 2), (2, 0), (-2, 0), (0, 2), (0, -2)}
        if (s.m, s.n) in basis:
            return TranslationSym(s)
        return NoSymmetry()
    if not isinstance(status, Periodic):
        return NoSymmetry()
    segs = _period_segments(tr)
    segset = _segment_set(segs)
    xs = [p[0] for ab in segset for p in ab]
    ys = [p[1] for ab in segset for p in ab]
    cx, cy = sum(xs) / len(xs), sum(ys) / len(ys)
    for cand in _rotation_center_candidates(cx, cy):
        if _coarse(_rotate_set(segset, cand, 2)) == _coarse(segset):
            return Order3(cand)
    return NoSymmetry()


def order6_invariant(tr: TraceResult, center: Vec2) -> bool:
    segset = _segment_set(_period_segments(tr))
    return _coarse(_rotate_set(segset, center, 1)) == _coarse(segset)


def _rotation_center_candidates(cx: float, cy: float) -> list[Vec2]:
    """Order-three centers of the tiling near (cx, cy): hexagon centers and
    triangle centroids."""
    from .tiling import _center_guess

    m0, n0 = _center_guess(cx, cy)
    cands = []
    for dm in (-2, -1, 0, 1, 2):
        for dn in (-2, -1, 0, 1, 2):
            c = LatticeVec(2 * (m0 + dm), 2 * (n0 + dn))
            x, y = c.to_floats()
            cands.append((abs(x - cx) + abs(y - cy), Vec2(x, y)))
            h = Hexagon(c)
            for e in range(6):
                t = neighbor(h, e)
                a = t.anchor()
                tx, ty = a.to_floats()
                cands.append((abs(tx / 3 - cx) + abs(ty / 3 - cy), Vec2(tx / 3, ty / 3)))
    cands.sort(key=lambda p: p[0])
    seen = set()
    out = []
    for _, v in cands:
        key = (round(v.x, 9), round(v.y, 9))
        if key not in seen:
            seen.add(key)
            out.append(v)
        if len(out) >= 12:
            break
    return out
