"""Eisenstein lattice directions: hexagonal norm, visibility, classification.

The lattice is generated by v0 = (1, 0), v1 = (-1/2, sqrt3/2) and
v2 = (-1/2, -sqrt3/2), with v0 + v1 + v2 = 0.  A LatticeVec (m, n) stands for
m*v1 + n*v2; the redundant triple (a, b, c) with a*v0 + b*v1 + c*v2 satisfies
b - a = m and c - a = n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from math import gcd

from .exact import QSqrt3, Vec2, apply_mat2, rotation_sixth


class DirectionClass(Enum):
    PERIODIC = "Periodic"
    DRIFT_PERIODIC = "DriftPeriodic"
    NOT_LATTICE = "NotLattice"


@dataclass(frozen=True)
class LatticeVec:
    m: int
    n: int

    def __add__(self, other: "LatticeVec") -> "LatticeVec":
        return LatticeVec(self.m + other.m, self.n + other.n)

    def __sub__(self, other: "LatticeVec") -> "LatticeVec":
        return LatticeVec(self.m - other.m, self.n - other.n)

    def __neg__(self) -> "LatticeVec":
        return LatticeVec(-self.m, -self.n)

    def scale(self, k: int) -> "LatticeVec":
        return LatticeVec(k * self.m, k * self.n)

    def is_zero(self) -> bool:
        return self.m == 0 and self.n == 0

    def to_vec2(self) -> Vec2:
        """Exact plane coordinates m*v1 + n*v2."""
        return Vec2(QSqrt3(-self.m - self.n, 0, 2), QSqrt3(0, self.m - self.n, 2))

    def to_floats(self) -> tuple[float, float]:
        return (-(self.m + self.n) / 2.0, (self.m - self.n) * math.sqrt(3.0) / 2.0)

    def angle(self) -> float:
        x, y = self.to_floats()
        return math.atan2(y, x)

    def primitive(self) -> "LatticeVec":
        """The visible vector on the same ray."""
        if self.is_zero():
            raise ValueError("zero vector has no direction")
        g = gcd(abs(self.m), abs(self.n))
        return LatticeVec(self.m // g, self.n // g)


V0 = LatticeVec(-1, -1)  # v0 = -v1 - v2
V1 = LatticeVec(1, 0)
V2 = LatticeVec(0, 1)

# Rotation by +pi/3 acts on (m, n) as (m - n, m): it sends v1 to v1 + v2 and
# v2 to -v1.  Frozen convention; norm preservation is covered by tests.
ROT_SIXTH = ((1, -1), (1, 0))
# Reflection across the vertical axis x = 0 sends v1 to -v2 and v2 to -v1.
REFLECT_VERTICAL = ((0, -1), (-1, 0))


def apply_intmat(mat, v: LatticeVec) -> LatticeVec:
    (a, b), (c, d) = mat
    return LatticeVec(a * v.m + b * v.n, c * v.m + d * v.n)


def rotate_lattice(v: LatticeVec, k: int) -> LatticeVec:
    """Rotate by k*pi/3 (k may be negative)."""
    out = v
    for _ in range(k % 6):
        out = apply_intmat(ROT_SIXTH, out)
    return out


def hex_norm(v: LatticeVec) -> int:
    """min |a|+|b|+|c| over representations a*v0 + b*v1 + c*v2."""
    t = -_median(0, v.m, v.n)
    return abs(t) + abs(v.m + t) + abs(v.n + t)


def hex_norm_bruteforce(v: LatticeVec) -> int:
    """Test oracle: minimize over an exhaustive shift range."""
    span = abs(v.m) + abs(v.n) + 1
    return min(
        abs(t) + abs(v.m + t) + abs(v.n + t) for t in range(-span, span + 1)
    )


def _median(a: int, b: int, c: int) -> int:
    return sorted((a, b, c))[1]


def is_visible(v: LatticeVec) -> bool:
    """True when no shorter lattice vector blocks v from the origin."""
    if v.is_zero():
        raise ValueError("zero vector is not a direction")
    return gcd(abs(v.m), abs(v.n)) == 1


def classify_tiling_direction(v: LatticeVec) -> DirectionClass:
    """Periodic / drift-periodic dichotomy for the refractive flow.

    The direction is reduced to its visible representative first; drift
    happens exactly when the hexagonal norm is divisible by three.
    """
    w = v.primitive()
    if hex_norm(w) % 3 == 0:
        return DirectionClass.DRIFT_PERIODIC
    return DirectionClass.PERIODIC


def classify_surface_direction(v: LatticeVec) -> DirectionClass:
    """Same dichotomy for straight-line flow on the translation surface.

    On the surface the criterion reads m = n mod 3.  It matches the tiling
    classifier on the sector where m >= 0 >= n.
    """
    if not is_visible(v):
        raise ValueError("classify_surface_direction expects a visible vector")
    if (v.m - v.n) % 3 == 0:
        return DirectionClass.DRIFT_PERIODIC
    return DirectionClass.PERIODIC


SECTOR_LO = math.pi / 3
SECTOR_HI = 2 * math.pi / 3


@dataclass(frozen=True)
class Isometry:
    """Tiling isometry used for standardization.

    Applied as: optional reflection across the vertical axis through the
    origin (a hexagon center), then rotation by rot_sixths * pi/3 about the
    origin.
    """

    reflect: bool
    rot_sixths: int

    def apply_angle(self, theta: float) -> float:
        if self.reflect:
            theta = math.pi - theta
        return theta + self.rot_sixths * math.pi / 3

    def apply_lattice(self, v: LatticeVec) -> LatticeVec:
        if self.reflect:
            v = apply_intmat(REFLECT_VERTICAL, v)
        return rotate_lattice(v, self.rot_sixths)

    def matrix(self, exact: bool = True):
        rot = rotation_sixth(self.rot_sixths, exact)
        if not self.reflect:
            return rot
        (a, b), (c, d) = rot
        return ((-a, b), (-c, d))  # rot . diag(-1, 1)

    def apply_point(self, p: Vec2) -> Vec2:
        return apply_mat2(self.matrix(exact=p.is_exact), p)


def standardize_angle(theta: float, sign: str = "+") -> tuple[float, Isometry]:
    """Move (theta, sign) to an equivalent (theta', '+') with theta' in
    [pi/3, 2pi/3].  Returns the new angle and the isometry that realizes it.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    reflect = sign == "-"
    base = math.pi - theta if reflect else theta
    k = math.ceil((SECTOR_LO - base) / (math.pi / 3) - 1e-12)
    theta_p = base + k * math.pi / 3
    # land inside [pi/3, 2pi/3]; ties at the top edge fold back
    if theta_p > SECTOR_HI + 1e-12:
        k -= 1
        theta_p = base + k * math.pi / 3
    return theta_p, Isometry(reflect, k % 6)


def standardize_lattice(v: LatticeVec, sign: str = "+") -> tuple[LatticeVec, Isometry]:
    """Exact analogue for lattice directions: image has m >= 0 >= n."""
    if v.is_zero():
        raise ValueError("zero vector is not a direction")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    reflect = sign == "-"
    w = apply_intmat(REFLECT_VERTICAL, v) if reflect else v
    for k in range(6):
        img = rotate_lattice(w, k)
        if img.m >= 0 and img.n <= 0:
            return img, Isometry(reflect, k)
    raise AssertionError("rotation orbit must meet the standard sector")


def in_sector(v: LatticeVec) -> bool:
    """Direction angle lies in [pi/3, 2pi/3]."""
    return v.m >= 0 and v.n <= 0 and not v.is_zero()
