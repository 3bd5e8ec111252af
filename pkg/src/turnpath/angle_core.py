"""Oriented angles, their arithmetic, and line-side predicates.

Orientation convention: an angle is positive when measured clockwise from the
first vector to the second.  Equivalently, ``oriented_angle(U, V) > 0`` iff
``det[U; V] < 0``.  A turn angle ``oriented_angle(next - cur, cur - prev)`` is
therefore positive for a left (counterclockwise) change of heading.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

EPS_ANGLE = 1e-9
EPS_SIDE = 1e-12
TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DomainError(GeometryError):
    pass


class DegenerateError(GeometryError):
    pass


class ParallelLinesError(GeometryError):
    pass


class Point(NamedTuple):
    """A planar point or vector.  Tuple ordering is the canonical point order."""

    c1: float
    c2: float

    def __add__(self, other):  # type: ignore[override]
        return Point(self.c1 + other[0], self.c2 + other[1])

    def __sub__(self, other):
        return Point(self.c1 - other[0], self.c2 - other[1])

    def __neg__(self):
        return Point(-self.c1, -self.c2)

    def scale(self, k: float) -> "Point":
        return Point(k * self.c1, k * self.c2)

    def norm(self) -> float:
        return math.hypot(self.c1, self.c2)


def as_point(p: Sequence[float]) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"non-finite coordinates {p!r}")
    return Point(x, y)


def det(u: Sequence[float], v: Sequence[float]) -> float:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Sequence[float], v: Sequence[float]) -> float:
    return u[0] * v[0] + u[1] * v[1]


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


class LineSide(enum.Enum):
    STRICT_RIGHT = "StrictRight"
    STRICT_LEFT = "StrictLeft"
    ON_LINE = "OnLine"


@dataclass(frozen=True)
class AngleBounds:
    mu_lo: float
    mu_hi: float
    sigma: float


def reduce_2pi(x: float) -> float:
    """Representative of ``x`` modulo 2*pi in the half-open interval (-pi, pi]."""
    if not math.isfinite(x):
        raise DomainError(f"non-finite angle {x!r}")
    if -math.pi < x <= math.pi:
        return float(x)
    r = math.remainder(x, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


def angle_add(a: float, b: float) -> float:
    return reduce_2pi(a + b)


def oriented_angle(u: Sequence[float], v: Sequence[float]) -> float:
    """Clockwise-positive angle from ``u`` to ``v`` in (-pi, pi].

    Opposite vectors give pi and a zero vector gives 0.  The magnitude is the
    arccos of the normalized inner product, evaluated through ``atan2`` so that
    it stays accurate near 0 and pi.
    """
    u1, u2, v1, v2 = float(u[0]), float(u[1]), float(v[0]), float(v[1])
    if not all(math.isfinite(c) for c in (u1, u2, v1, v2)):
        raise DomainError("non-finite vector")
    if (u1 == 0.0 and u2 == 0.0) or (v1 == 0.0 and v2 == 0.0):
        return 0.0
    d = u1 * v2 - u2 * v1
    magnitude = math.atan2(abs(d), u1 * v1 + u2 * v2)
    return -magnitude if d > 0.0 else magnitude


def oriented_angle_array(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized :func:`oriented_angle` over trailing coordinate axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    d = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    magnitude = np.arctan2(np.abs(d), u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1])
    out = np.where(d > 0.0, -magnitude, magnitude)
    zero = ((u[..., 0] == 0.0) & (u[..., 1] == 0.0)) | ((v[..., 0] == 0.0) & (v[..., 1] == 0.0))
    return np.where(zero, 0.0, out)


def turn_angle(prev: Sequence[float], cur: Sequence[float], nxt: Sequence[float]) -> float:
    """Turn at ``cur`` of the path prev -> cur -> next (positive = left turn)."""
    incoming = (cur[0] - prev[0], cur[1] - prev[1])
    outgoing = (nxt[0] - cur[0], nxt[1] - cur[1])
    if incoming == (0.0, 0.0) or outgoing == (0.0, 0.0):
        raise DegenerateError("coincident consecutive points")
    return oriented_angle(outgoing, incoming)


def side_of_line(a: Sequence[float], b: Sequence[float], c: Sequence[float],
                 eps: float = EPS_SIDE) -> LineSide:
    """Side of ``c`` relative to the directed line a -> b."""
    ab = (b[0] - a[0], b[1] - a[1])
    if ab == (0.0, 0.0):
        raise DegenerateError("line through coincident points")
    ac = (c[0] - a[0], c[1] - a[1])
    d = det(ab, ac)
    if abs(d) <= eps * max(1.0, math.hypot(*ab) * math.hypot(*ac)):
        return LineSide.ON_LINE
    return LineSide.STRICT_RIGHT if d < 0.0 else LineSide.STRICT_LEFT


def line_intersection(a: Sequence[float], e: Sequence[float], b: Sequence[float],
                      d: Sequence[float], eps: float = EPS_SIDE) -> Point:
    """Intersection of line (a, e) with line (b, d) by Cramer's rule."""
    m11, m12 = e[0] - a[0], b[0] - d[0]
    m21, m22 = e[1] - a[1], b[1] - d[1]
    delta = m11 * m22 - m12 * m21
    scale = math.hypot(m11, m21) * math.hypot(m12, m22)
    if scale == 0.0 or abs(delta) <= eps * scale:
        raise ParallelLinesError("lines are parallel or degenerate")
    delta1 = (b[0] - a[0]) * m22 - m12 * (b[1] - a[1])
    r = delta1 / delta
    return Point(a[0] + r * m11, a[1] + r * m21)


def in_triangle(a: Sequence[float], b: Sequence[float], c: Sequence[float],
                p: Sequence[float], eps: float = EPS_SIDE) -> bool:
    """True iff ``p`` lies in the closed triangle abc, with c right of a -> b.

    The triangle is the set of points on or to the right of each of the
    directed lines a -> b, b -> c and c -> a.
    """
    if side_of_line(a, b, c, eps) is not LineSide.STRICT_RIGHT:
        raise DegenerateError("triangle is degenerate or wrongly oriented")
    return all(
        side_of_line(u, v, p, eps) is not LineSide.STRICT_LEFT
        for u, v in ((a, b), (b, c), (c, a))
    )


def cumulative_bounds(alphas: Sequence[float], i: int, j: int) -> AngleBounds:
    """Extremes of the partial sums of alphas[j+1..i] (1-based), zero included."""
    n = len(alphas)
    if not (1 <= i <= n and 0 <= j <= i - 1):
        raise IndexError(f"need 1 <= i <= {n} and 0 <= j < i, got i={i}, j={j}")
    run, lo, hi, sigma = 0.0, 0.0, 0.0, 0.0
    for a in alphas[j:i]:
        run += a
        sigma += abs(a)
        lo, hi = min(lo, run), max(hi, run)
    return AngleBounds(mu_lo=lo, mu_hi=hi, sigma=sigma)
