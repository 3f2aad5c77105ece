"""The translation surface S, its quotient torus Z (three rhombi), the
monodromy homomorphism, cylinder/strip decompositions, and the orbit
equivalence with the tiling flow.

Z is modeled as three copies ("sheets" 0, 1, 2) of the standard rhombus,
glued edge 1 <-> 3 and edge 2 <-> 4 with sheet shifts +-1.  In the frames of
the sheets the gluings are plane translations, so straight-line flow is
literally straight.  S is the 2*Lambda cover: a point of S is a sheet index
together with a hexagon center; flowing across a glued edge adds a deck
increment in 2*Lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .exact import HALF, QSqrt3, SQRT3_HALF, Vec2
from .lattice import LatticeVec, is_visible
from .rhombus import (
    MODEL,
    RhombusCoord,
    SectionPoint,
    SingularOrbit,
    V,
    section_return,
)
from .tracer import RayState, trace
from .tiling import Hexagon

# plane translations of the four gluings, model frame
_SHIFT = {
    1: Vec2(HALF, SQRT3_HALF),    # -v2 : edge 1 of sheet i -> edge 3 of sheet i+1
    2: Vec2(-HALF, SQRT3_HALF),   # +v1 : edge 2 -> edge 4 of sheet i+1
    3: Vec2(-HALF, -SQRT3_HALF),  # +v2 : edge 3 -> edge 1 of sheet i-1
    4: Vec2(HALF, -SQRT3_HALF),   # -v1 : edge 4 -> edge 2 of sheet i-1
}
_SHIFT_F = {k: v.to_float() for k, v in _SHIFT.items()}


def glue_edge(i: int, edge: int) -> tuple[int, int, LatticeVec]:
    """(new sheet, new edge label, deck increment) for crossing `edge` of
    sheet i outward."""
    if edge == 1:
        return (i + 1) % 3, 3, -V[(i + 1) % 3].scale(2)
    if edge == 2:
        return (i + 1) % 3, 4, V[i % 3].scale(2)
    if edge == 3:
        return (i - 1) % 3, 1, V[i % 3].scale(2)
    if edge == 4:
        return (i - 1) % 3, 2, -V[(i - 1) % 3].scale(2)
    raise ValueError("edge label must be 1..4")


def glue_shift(edge: int, exact: bool = True) -> Vec2:
    return _SHIFT[edge] if exact else _SHIFT_F[edge]


@dataclass(frozen=True)
class SurfacePoint:
    rhombus: RhombusCoord
    local: Vec2  # model-frame coordinates in the chart of R^0_0


# ---------------------------------------------------------------------------
# curves on Z and the monodromy homomorphism


@dataclass(frozen=True)
class LoopSeg:
    sheet: int
    a: Vec2
    b: Vec2


# horizontal core strands and the diagonal strand used by the basis loops
_HSEG_U = (Vec2(QSqrt3(1, 0, 4), QSqrt3(0, 1, 4)), Vec2(QSqrt3(3, 0, 4), QSqrt3(0, 1, 4)))
_HSEG_L = (Vec2(QSqrt3(1, 0, 4), QSqrt3(0, -1, 4)), Vec2(QSqrt3(3, 0, 4), QSqrt3(0, -1, 4)))
_MSEG = (Vec2(QSqrt3(1, 0, 4), QSqrt3(0, -1, 4)), Vec2(QSqrt3(3, 0, 4), QSqrt3(0, 1, 4)))

# Closed loops generating H1(Z minus punctures).  alpha crosses the three
# 1<->3 gluings once each (monodromy 0); beta_k is the core of a horizontal
# cylinder with monodromy -2 v_k.
BASIS_LOOPS: dict[str, tuple[LoopSeg, ...]] = {
    "alpha": (
        LoopSeg(0, *_MSEG),
        LoopSeg(2, *_MSEG),
        LoopSeg(1, *_MSEG),
    ),
    "beta0": (LoopSeg(2, *_HSEG_U), LoopSeg(1, *_HSEG_L)),
    "beta1": (LoopSeg(0, *_HSEG_U), LoopSeg(2, *_HSEG_L)),
    "beta2": (LoopSeg(1, *_HSEG_U), LoopSeg(0, *_HSEG_L)),
}

# relative 1-chains eta0, eta1 on (Z, punctures): signed long diagonals.
# Their intersection functionals reproduce the monodromy on the basis above.
_LONG_DIAG = (Vec2(HALF, -SQRT3_HALF), Vec2(HALF, SQRT3_HALF))
ETA_ARCS: dict[str, tuple[tuple[int, int], ...]] = {
    # (sheet, orientation sign) of one long-diagonal arc each
    "eta0": ((2, 1), (0, -1)),
    "eta1": ((2, 1), (1, -1)),
}


@dataclass(frozen=True)
class CurveWord:
    """Formal word in alpha, beta0, beta1, beta2; a class in H1 by
    abelianization."""

    letters: tuple[tuple[str, int], ...]

    @classmethod
    def parse(cls, text: str) -> "CurveWord":
        out = []
        for tok in text.split():
            if "^" in tok:
                name, e = tok.split("^")
                out.append((name, int(e)))
            else:
                out.append((tok, 1))
        return cls(tuple(out))

    def __iter__(self):
        return iter(self.letters)


def _edge_of_point(p: Vec2) -> Optional[int]:
    """Which model edge (1..4) contains p, None if interior."""
    for edge in range(1, 5):
        a = MODEL[edge - 1]
        b = MODEL[edge % 4]
        if (b - a).cross(p - a).is_zero():
            lo = (p - a).dot(b - a)
            hi = (p - b).dot(a - b)
            if lo.sign() > 0 and hi.sign() > 0:
                return edge
    return None


def develop_loop(loop: tuple[LoopSeg, ...]) -> LatticeVec:
    """Deck element of one closed loop: accumulate gluing increments while
    walking its segments in order."""
    total = LatticeVec(0, 0)
    n = len(loop)
    for k, seg in enumerate(loop):
        edge = _edge_of_point(seg.b)
        if edge is None:
            raise ValueError("loop segment must end on a glued edge")
        sheet2, _, deck = glue_edge(seg.sheet, edge)
        total = total + deck
        nxt = loop[(k + 1) % n]
        if nxt.sheet != sheet2 or nxt.a != seg.b + glue_shift(edge):
            raise ValueError("loop segments are not glued consecutively")
    return total


def develop_curve(word: CurveWord) -> LatticeVec:
    """Deck element of the word, by developing each basis loop through the
    gluings (linear on homology since the deck group is abelian)."""
    total = LatticeVec(0, 0)
    for name, exp in word:
        total = total + develop_loop(BASIS_LOOPS[name]).scale(exp)
    return total


def _crossing_sign(eta_a: Vec2, eta_b: Vec2, a: Vec2, b: Vec2) -> int:
    """Signed transversal crossing of segment (a,b) with arc (eta_a,eta_b);
    0 when they do not cross.  Endpoint contact is rejected."""
    de = eta_b - eta_a
    dg = b - a
    denom = de.cross(dg)
    if denom.is_zero():
        return 0
    t = (a - eta_a).cross(dg) / denom  # along eta
    s = (a - eta_a).cross(de) / denom  # along gamma
    one = QSqrt3(1)
    ts, te = t.sign(), (t - one).sign()
    ss, se = s.sign(), (s - one).sign()
    if ts > 0 and te < 0 and ss > 0 and se < 0:
        return denom.sign()
    if (ts == 0 or te == 0) and ss > 0 and se < 0:
        raise ValueError("curve passes through an eta endpoint")
    if (ss == 0 or se == 0) and ts > 0 and te < 0:
        raise ValueError("curve endpoint lies on an eta arc")
    return 0


def intersection_with_eta(word: CurveWord, eta: str) -> int:
    total = 0
    arcs = ETA_ARCS[eta]
    for name, exp in word:
        for seg in BASIS_LOOPS[name]:
            for sheet, orient in arcs:
                if seg.sheet != sheet:
                    continue
                sgn = _crossing_sign(_LONG_DIAG[0], _LONG_DIAG[1], seg.a, seg.b)
                total += exp * orient * sgn
    return total


def monodromy_h(word: CurveWord) -> LatticeVec:
    """h(gamma) = 2 (eta0 . gamma) v0 + 2 (eta1 . gamma) v1, from exact
    crossing counts with the stored eta arcs."""
    a = intersection_with_eta(word, "eta0")
    b = intersection_with_eta(word, "eta1")
    return V[0].scale(2 * a) + V[1].scale(2 * b)


# ---------------------------------------------------------------------------
# straight-line flow on the three-sheet torus (used for cylinders and the
# covering checks)


def _sign(v) -> int:
    if isinstance(v, QSqrt3):
        return v.sign()
    return (v > 0) - (v < 0)


def flow_on_z(
    sheet: int,
    p: Vec2,
    u: Vec2,
    max_steps: int = 100_000,
    stop_at_start: bool = True,
):
    """March the straight-line flow on Z from (sheet, p) in direction u.

    Yields (sheet, point, deck increment, chord parameter) per crossing and
    stops when the starting state recurs (a closed orbit) or after
    max_steps.  Returns (closed, steps, total deck, total parameter,
    unfolded displacement check data).
    """
    exact = p.is_exact
    start_key = (sheet, p.x, p.y)
    deck = LatticeVec(0, 0)
    zero = QSqrt3(0) if exact else 0.0
    total_t = zero
    crossings = []
    cur_sheet, cur = sheet, p
    for step in range(max_steps):
        hit = _exit_any_edge(cur, u)
        if hit is None:
            raise SingularOrbit("flow on Z leaves through a vertex")
        t, edge, q = hit
        total_t = total_t + t
        sheet2, _, dc = glue_edge(cur_sheet, edge)
        deck = deck + dc
        cur = q + glue_shift(edge, exact)
        cur_sheet = sheet2
        crossings.append((cur_sheet, cur, dc, t))
        if stop_at_start and (cur_sheet, cur.x, cur.y) == start_key:
            return True, step + 1, deck, total_t, crossings
    return False, max_steps, deck, total_t, crossings


def _exit_any_edge(p: Vec2, u: Vec2):
    """First crossing of the ray p + t*u with the model boundary."""
    exact = p.is_exact
    verts = MODEL if exact else tuple(v.to_float() for v in MODEL)
    best = None
    for edge in range(1, 5):
        a = verts[edge - 1]
        b = verts[edge % 4]
        e = b - a
        denom = u.cross(e)
        if _sign(denom) == 0:
            continue
        t = (a - p).cross(e) / denom
        s = (a - p).cross(u) / denom
        if _sign(t) <= 0:
            continue
        one = QSqrt3(1) if exact else 1.0
        ss, se = _sign(s), _sign(s - one)
        if ss < 0 or se > 0:
            continue
        if ss == 0 or se == 0:
            raise SingularOrbit("edge endpoint hit on Z")
        if best is None or t < best[0]:
            q = Vec2(p.x + u.x * t, p.y + u.y * t)
            best = (t, edge, q)
    return best


# ---------------------------------------------------------------------------
# cylinder decomposition


@dataclass
class CylinderInfo:
    direction: LatticeVec
    holonomy: Vec2          # exact chart vector, sign-normalized
    area: QSqrt3
    lift: str               # "cylinder" or "strip"
    deck_generator: Optional[LatticeVec]
    circumference: float
    residues: tuple[int, ...]  # puncture residues bounding the cylinder


def _canonical_hol(v: Vec2) -> Vec2:
    s = v.x.sign() if isinstance(v.x, QSqrt3) else _sign(v.x)
    if s < 0 or (s == 0 and (v.y.sign() if isinstance(v.y, QSqrt3) else _sign(v.y)) < 0):
        return -v
    return v


def cylinder_decomposition(v: LatticeVec) -> list[CylinderInfo]:
    """Decompose Z in the direction of the visible lattice vector v by
    cutting along the orbits through the three punctures.

    For m = n mod 3 this yields three equal-area strips whose deck
    generators are (up to sign) 2v0, 2v1, 2v2; otherwise a single cylinder
    that lifts closed.
    """
    if not is_visible(v):
        raise ValueError("cylinder_decomposition expects a visible vector")
    m, n = v.m, v.n
    k = 1 if (m - n) % 3 == 0 else 3
    rho_period = 3 // k  # transversal circle in units of sqrt3/2
    # puncture residues along the transversal: P0 at 0, P1 at n, P2 at -m
    residues = sorted({0 % rho_period, n % rho_period, (-m) % rho_period})
    u = v.to_vec2()
    speed = u.norm()
    out = []
    for idx, rho in enumerate(residues):
        nxt = residues[(idx + 1) % len(residues)]
        gap = (nxt - rho) % rho_period
        if gap == 0:
            gap = rho_period
        start = _gap_representative(v, rho, gap, rho_period)
        closed, steps, deck, total_t, _ = flow_on_z(0, start, u)
        if not closed:
            raise AssertionError("core flow did not close")
        hol = _canonical_hol(Vec2(u.x * total_t, u.y * total_t))
        area = QSqrt3(0, gap * k, 2)  # gap * sqrt3/2 * k
        out.append(
            CylinderInfo(
                direction=v,
                holonomy=hol,
                area=area,
                lift="cylinder" if deck.is_zero() else "strip",
                deck_generator=None if deck.is_zero() else deck,
                circumference=float(total_t) * speed,
                residues=(rho, nxt),
            )
        )
    return out


def _gap_representative(v: LatticeVec, rho: int, gap: int, rho_period: int) -> Vec2:
    """An interior point of sheet 0 whose transversal coordinate falls
    strictly inside the open residue gap (rho, rho + gap).

    Points (a/16, b*sqrt3/16) have rational transversal coordinate
    -((m-n)a + (m+n)b)/16, so a small grid always meets every unit gap.
    """
    from fractions import Fraction

    from .tiling import point_in_convex

    m, n = v.m, v.n
    lo = Fraction(rho)
    hi = Fraction(rho + gap)
    for a in range(2, 15):
        for b in range(-6, 7):
            val = Fraction(-((m - n) * a + (m + n) * b), 16)
            # reduce modulo the period into [lo, lo + period)
            off = (val - lo) % Fraction(rho_period)
            if 0 < off < hi - lo:
                p = Vec2(QSqrt3(a, 0, 16), QSqrt3(0, b, 16))
                if point_in_convex(p, list(MODEL)) == "in":
                    return p
    raise AssertionError("no representative point found in the gap")


# ---------------------------------------------------------------------------
# orbit equivalence


@dataclass
class TimeChange:
    surface_return: float  # s_plus - s_minus
    tiling_return: float   # t_star
    fraction: float        # position of the point inside its return interval


def section_to_tiling(sp: SectionPoint, theta: float) -> RayState:
    """Unit tangent vector on the tiling's short diagonal matching the
    surface section point: based at c + x*v_i, at angle theta from the
    outward diagonal direction."""
    r = sp.rhombus
    x = float(sp.x)
    cx, cy = r.c.to_floats()
    vx, vy = V[r.i].to_floats()
    pos = Vec2(cx + vx * x, cy + vy * x)
    phi = theta + r.i * 2 * math.pi / 3
    d = Vec2(math.cos(phi), math.sin(phi))
    return RayState(pos, d, Hexagon(r.c), "+")


def orbit_equivalence(p: SurfacePoint, theta: float) -> tuple[RayState, TimeChange]:
    """Image of a surface point under the orbit equivalence, plus the time
    change data of its return interval.

    Section points map to tangent vectors on the corresponding tiling
    diagonal; a general point maps to the tiling point reached after the
    fraction (-s_minus) / (s_plus - s_minus) of the tiling return time t*.
    """
    if not (math.pi / 3 - 1e-12 <= theta <= 2 * math.pi / 3 + 1e-12):
        raise ValueError("theta must lie in [pi/3, 2pi/3]")
    u = Vec2(math.cos(theta), math.sin(theta))
    loc = p.local.to_float()
    r = p.rhombus
    if loc.y >= 0:
        # the section hit before p lies on this rhombus's own diagonal
        d_back = loc.y / u.y
        base = SectionPoint(r, loc.x - u.x * d_back)
    else:
        # flow backward across one gluing: leaving through edge 1 or 2
        # outward is exactly the reverse crossing of an edge-3/4 entry
        neg_u = Vec2(-u.x, -u.y)
        hit = _exit_any_edge(loc, neg_u)
        if hit is None:
            raise SingularOrbit("backward flow hits a vertex")
        t1, edge, q = hit
        if edge not in (1, 2):
            raise SingularOrbit("backward flow left through an upper edge")
        sheet2, _, deck = glue_edge(r.i, edge)
        r = RhombusCoord(sheet2, r.c + deck)
        q2 = q + glue_shift(edge, exact=False)
        t2 = q2.y / u.y
        base = SectionPoint(r, q2.x - u.x * t2)
        d_back = t1 + t2
    step = section_return(base, u)
    ret = step.time_surface  # = s_plus - s_minus
    t_star = step.time_tiling
    frac = d_back / ret
    state0 = section_to_tiling(base, theta)
    if frac <= 1e-15:
        return state0, TimeChange(ret, t_star, 0.0)
    pos = _tiling_flow_position(state0, t_star * frac)
    return pos, TimeChange(ret, t_star, frac)


def _tiling_flow_position(state: RayState, time: float) -> RayState:
    """Flow a tiling state forward by `time` (unit speed), piecewise through
    the tracer."""
    tr = trace(state.pos, math.atan2(state.dir.y, state.dir.x), max_steps=16)
    remaining = time
    for seg in tr.segments:
        a = seg.start.to_float()
        b = seg.end.to_float()
        seg_len = (b - a).norm()
        if remaining <= seg_len:
            f = remaining / seg_len if seg_len > 0 else 0.0
            pos = Vec2(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)
            d = Vec2((b.x - a.x) / seg_len, (b.y - a.y) / seg_len)
            return RayState(pos, d, seg.tile, state.sign)
        remaining -= seg_len
    raise AssertionError("tiling flow ran past the traced horizon")
