"""Exact arithmetic in the field Q(sqrt(3)) and small planar vector algebra.

Every coordinate of the tiling (vertices, edge lines, lattice directions)
lives in Q(sqrt3), so periodicity detection in lattice directions needs no
tolerance at all.  A scalar is stored as (p + q*sqrt3)/r with integer p, q, r,
r > 0 and gcd(p, q, r) == 1.
"""

from __future__ import annotations

import math
from math import gcd

_SQRT3 = math.sqrt(3.0)


class QSqrt3:
    """Exact element (p + q*sqrt3)/r of Q(sqrt3)."""

    __slots__ = ("p", "q", "r")

    def __init__(self, p: int, q: int = 0, r: int = 1):
        if r == 0:
            raise ZeroDivisionError("zero denominator")
        if r < 0:
            p, q, r = -p, -q, -r
        g = gcd(gcd(abs(p), abs(q)), r)
        if g > 1:
            p //= g
            q //= g
            r //= g
        self.p = p
        self.q = q
        self.r = r

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, num: int, den: int = 1) -> "QSqrt3":
        return cls(num, 0, den)

    @classmethod
    def sqrt3(cls, num: int = 1, den: int = 1) -> "QSqrt3":
        """num/den times sqrt(3)."""
        return cls(0, num, den)

    @classmethod
    def coerce(cls, x) -> "QSqrt3":
        if isinstance(x, QSqrt3):
            return x
        if isinstance(x, int):
            return cls(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to QSqrt3")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            return QSqrt3(self.p + other * self.r, self.q, self.r)
        if not isinstance(other, QSqrt3):
            return NotImplemented
        return QSqrt3(
            self.p * other.r + other.p * self.r,
            self.q * other.r + other.q * self.r,
            self.r * other.r,
        )

    __radd__ = __add__

    def __neg__(self):
        return QSqrt3(-self.p, -self.q, self.r)

    def __sub__(self, other):
        if isinstance(other, int):
            return QSqrt3(self.p - other * self.r, self.q, self.r)
        if not isinstance(other, QSqrt3):
            return NotImplemented
        return QSqrt3(
            self.p * other.r - other.p * self.r,
            self.q * other.r - other.q * self.r,
            self.r * other.r,
        )

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, int):
            return QSqrt3(self.p * other, self.q * other, self.r)
        if not isinstance(other, QSqrt3):
            return NotImplemented
        return QSqrt3(
            self.p * other.p + 3 * self.q * other.q,
            self.p * other.q + self.q * other.p,
            self.r * other.r,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            return QSqrt3(self.p, self.q, self.r * other)
        if not isinstance(other, QSqrt3):
            return NotImplemented
        norm = other.p * other.p - 3 * other.q * other.q
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt3)")
        return QSqrt3(
            (self.p * other.p - 3 * self.q * other.q) * other.r,
            (self.q * other.p - self.p * other.q) * other.r,
            self.r * norm,
        )

    def __rtruediv__(self, other):
        return QSqrt3.coerce(other).__truediv__(self)

    # -- order and equality ------------------------------------------------

    def sign(self) -> int:
        """Exact sign: -1, 0 or +1."""
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return (q > 0) - (q < 0)
        if p > 0 and q > 0:
            return 1
        if p < 0 and q < 0:
            return -1
        # mixed signs: compare p^2 with 3 q^2
        d = p * p - 3 * q * q
        big_is_p = 1 if p > 0 else -1
        if d > 0:
            return big_is_p
        if d < 0:
            return -big_is_p
        return 0  # p^2 == 3 q^2 only for p == q == 0, unreachable

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.q == 0 and self.r == 1 and self.p == other
        if not isinstance(other, QSqrt3):
            return NotImplemented
        return self.p == other.p and self.q == other.q and self.r == other.r

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __hash__(self):
        if self.q == 0 and self.r == 1:
            return hash(self.p)
        return hash((self.p, self.q, self.r))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- conversions -------------------------------------------------------

    def __float__(self):
        return (self.p + self.q * _SQRT3) / self.r

    def __repr__(self):
        return f"QSqrt3({self.p}, {self.q}, {self.r})"

    def exact_str(self) -> str:
        """Canonical string like '1/2+3/2*sqrt3'."""

        def frac(n):
            return f"{n}" if self.r == 1 else f"{n}/{self.r}"

        if self.q == 0:
            return frac(self.p)
        s = "" if self.p == 0 else frac(self.p) + ("+" if self.q > 0 else "")
        if self.q == 1 and self.r == 1:
            return s + "sqrt3"
        return s + frac(self.q) + "*sqrt3"


ZERO = QSqrt3(0)
ONE = QSqrt3(1)
HALF = QSqrt3(1, 0, 2)
SQRT3_HALF = QSqrt3(0, 1, 2)
SQRT3 = QSqrt3(0, 1, 1)


class Vec2:
    """Plane vector over one scalar mode: both entries QSqrt3, or both float.

    Mixing exact and float coordinates in a single vector (or binary
    operation) raises, so a computation stays in one mode throughout.
    """

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        exact = isinstance(x, QSqrt3)
        if exact != isinstance(y, QSqrt3):
            raise TypeError("Vec2 components must share one mode")
        if not exact and not (isinstance(x, float) and isinstance(y, float)):
            if isinstance(x, int) and isinstance(y, int):
                x, y = QSqrt3(x), QSqrt3(y)
            else:
                raise TypeError("Vec2 components must be QSqrt3 or float")
        self.x = x
        self.y = y

    @property
    def is_exact(self) -> bool:
        return isinstance(self.x, QSqrt3)

    def __add__(self, other):
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self):
        return Vec2(-self.x, -self.y)

    def scale(self, t):
        return Vec2(self.x * t, self.y * t)

    def dot(self, other):
        return self.x * other.x + self.y * other.y

    def cross(self, other):
        return self.x * other.y - self.y * other.x

    def norm2(self):
        return self.x * self.x + self.y * self.y

    def norm(self) -> float:
        return math.hypot(float(self.x), float(self.y))

    def to_float(self) -> "Vec2":
        if self.is_exact:
            return Vec2(float(self.x), float(self.y))
        return self

    def __eq__(self, other):
        if not isinstance(other, Vec2):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"Vec2({self.x!r}, {self.y!r})"


def reflect_across_dir(v: Vec2, e: Vec2) -> Vec2:
    """Reflection of v across the line spanned by the *unit* vector e."""
    t = v.dot(e) * 2
    return Vec2(e.x * t - v.x, e.y * t - v.y)


def rotation_sixth(k: int, exact: bool = True):
    """Matrix of rotation by k*pi/3 as ((a, b), (c, d)) rows.

    Entries are QSqrt3 when exact, floats otherwise.
    """
    k %= 6
    halves = {0: (2, 0), 1: (1, 1), 2: (-1, 1), 3: (-2, 0), 4: (-1, -1), 5: (1, -1)}
    c2, s2 = halves[k]  # 2*cos, and sin in units of sqrt3/2... see below
    # cos(k pi/3) = c2/2, sin(k pi/3) = s2 * sqrt3/2
    if exact:
        c = QSqrt3(c2, 0, 2)
        s = QSqrt3(0, s2, 2)
    else:
        c = c2 / 2.0
        s = s2 * _SQRT3 / 2.0
    return ((c, -s), (s, c))


def apply_mat2(mat, v: Vec2) -> Vec2:
    (a, b), (c, d) = mat
    return Vec2(a * v.x + b * v.y, c * v.x + d * v.y)
