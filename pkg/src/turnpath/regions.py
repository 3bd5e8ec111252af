"""Turn-feasibility regions S(A, B, phi), cones, and the canonical frame.

S(A, B, phi) holds the points C != A, B whose turn angle
``oriented_angle(B - C, C - A)`` lies in (-phi, phi).  For phi < pi it is the
union of two circular segments over the chord AB.  Membership is decided in
the canonical frame that sends A to (0, -1) and B to (0, 1), where the turn
angle becomes the scalar function ``psi``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .angle_core import (
    EPS_ANGLE,
    EPS_SIDE,
    DegenerateError,
    GeometryError,
    LineSide,
    Point,
    as_point,
    oriented_angle,
    side_of_line,
)


class Closure(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


class Side(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


class SingularPointError(GeometryError):
    """Psi or its gradient requested at one of the chord endpoints."""


class UnboundedRegionError(GeometryError):
    pass


@dataclass(frozen=True)
class TurnRegion:
    A: Point
    B: Point
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "A", as_point(self.A))
        object.__setattr__(self, "B", as_point(self.B))
        if self.A == self.B:
            raise DegenerateError("region endpoints coincide")
        if not self.phi > 0.0:
            raise GeometryError(f"phi must be positive, got {self.phi}")


@dataclass(frozen=True)
class Cone:
    apex: Point
    axis: Point
    half_angle: float

    def __post_init__(self):
        object.__setattr__(self, "apex", as_point(self.apex))
        object.__setattr__(self, "axis", as_point(self.axis))
        if self.axis == (0.0, 0.0):
            raise DegenerateError("cone axis is the zero vector")
        if not 0.0 < self.half_angle < math.pi:
            raise GeometryError(f"half angle must lie in (0, pi), got {self.half_angle}")


@dataclass(frozen=True)
class CanonicalFrame:
    """Similarity C = scale * rotation @ C_bar + midpoint."""

    rotation: np.ndarray
    midpoint: Point
    scale: float

    @classmethod
    def from_chord(cls, A: Sequence[float], B: Sequence[float]) -> "CanonicalFrame":
        dx, dy = B[0] - A[0], B[1] - A[1]
        length = math.hypot(dx, dy)
        if length == 0.0:
            raise DegenerateError("canonical frame needs A != B")
        e2 = (dx / length, dy / length)
        e1 = (e2[1], -e2[0])
        rotation = np.array([[e1[0], e2[0]], [e1[1], e2[1]]])
        midpoint = Point(0.5 * (A[0] + B[0]), 0.5 * (A[1] + B[1]))
        return cls(rotation=rotation, midpoint=midpoint, scale=0.5 * length)

    def forward(self, pts: np.ndarray) -> np.ndarray:
        """World points (..., 2) to canonical coordinates."""
        rel = np.asarray(pts, dtype=float) - np.asarray(self.midpoint)
        return (rel @ self.rotation) / self.scale

    def inverse(self, pts: np.ndarray) -> np.ndarray:
        return self.scale * (np.asarray(pts, dtype=float) @ self.rotation.T) + np.asarray(self.midpoint)


def to_canonical(A: Sequence[float], B: Sequence[float], C: Sequence[float]) -> Point:
    """Coordinates of C in the frame where A = (0, -1) and B = (0, 1)."""
    dx, dy = B[0] - A[0], B[1] - A[1]
    length = math.hypot(dx, dy)
    if length == 0.0:
        raise DegenerateError("canonical frame needs A != B")
    ex, ey = dx / length, dy / length
    rx = C[0] - 0.5 * (A[0] + B[0])
    ry = C[1] - 0.5 * (A[1] + B[1])
    k = 2.0 / length
    return Point(k * (ey * rx - ex * ry), k * (ex * rx + ey * ry))


def psi(C: Sequence[float]) -> float:
    """Turn angle at C of the canonical chord path (0, -1) -> C -> (0, 1).

    Equals sign(c1) * arccos(u) with the convention sign(0) = 1.  Since
    sin(psi) = 2|c1| / D the value is evaluated as an atan2, which avoids
    the precision loss of arccos near 0 and pi.
    """
    c1, c2 = float(C[0]), float(C[1])
    if c1 == 0.0 and abs(c2) == 1.0:
        raise SingularPointError("psi is undefined at the chord endpoints")
    magnitude = math.atan2(2.0 * abs(c1), 1.0 - c1 * c1 - c2 * c2)
    return magnitude if c1 >= 0.0 else -magnitude


def psi_array(C: np.ndarray) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    c1, c2 = C[..., 0], C[..., 1]
    magnitude = np.arctan2(2.0 * np.abs(c1), 1.0 - c1 * c1 - c2 * c2)
    return np.where(c1 >= 0.0, magnitude, -magnitude)


def psi_gradient(C: Sequence[float], eps: float = 1e-14) -> tuple[float, float]:
    c1, c2 = float(C[0]), float(C[1])
    r2 = c1 * c1 + c2 * c2
    denom = (1.0 + r2) ** 2 - 4.0 * c2 * c2
    if denom <= eps:
        raise SingularPointError("gradient is singular at the chord endpoints")
    return 2.0 * (1.0 + c1 * c1 - c2 * c2) / denom, 4.0 * c1 * c2 / denom


def _psi_gradient_l1(C: np.ndarray) -> np.ndarray:
    c1, c2 = C[..., 0], C[..., 1]
    denom = (1.0 + c1 * c1 + c2 * c2) ** 2 - 4.0 * c2 * c2
    return (np.abs(2.0 * (1.0 + c1 * c1 - c2 * c2)) + np.abs(4.0 * c1 * c2)) / denom


def _straight_region_contains(region: TurnRegion, C: Point) -> bool:
    """phi == pi: the plane minus the two outer rays of the line AB."""
    A, B = region.A, region.B
    if side_of_line(A, B, C, EPS_SIDE) is not LineSide.ON_LINE:
        return True
    ab = (B[0] - A[0], B[1] - A[1])
    t = ((C[0] - A[0]) * ab[0] + (C[1] - A[1]) * ab[1]) / (ab[0] ** 2 + ab[1] ** 2)
    return 0.0 < t < 1.0


def region_contains(region: TurnRegion, C: Sequence[float],
                    closure: Closure = Closure.OPEN, tol: float = EPS_ANGLE) -> bool:
    """Membership of C in S(A, B, phi) (open) or cl S(A, B, phi) minus {A, B}."""
    C = as_point(C)
    if C == region.A or C == region.B:
        return False
    if region.phi > math.pi:
        return True
    if region.phi == math.pi:
        return closure is Closure.CLOSED or _straight_region_contains(region, C)
    value = abs(psi(to_canonical(region.A, region.B, C)))
    if closure is Closure.CLOSED:
        return value <= region.phi + tol
    return value < region.phi


def region_contains_array(A: Sequence[float], B: Sequence[float], phi: float, pts: np.ndarray,
                          closure: Closure = Closure.OPEN, tol: float = EPS_ANGLE) -> np.ndarray:
    """Vectorized :func:`region_contains` for phi < pi over points of shape (m, 2)."""
    if not 0.0 < phi < math.pi:
        raise UnboundedRegionError("vectorized membership needs 0 < phi < pi")
    pts = np.asarray(pts, dtype=float)
    frame = CanonicalFrame.from_chord(A, B)
    value = np.abs(psi_array(frame.forward(pts)))
    inside = value <= phi + tol if closure is Closure.CLOSED else value < phi
    at_end = ((pts[:, 0] == A[0]) & (pts[:, 1] == A[1])) | ((pts[:, 0] == B[0]) & (pts[:, 1] == B[1]))
    return inside & ~at_end


def _canonical_arc(phi: float, samples: int) -> np.ndarray:
    theta = np.linspace(-phi, phi, samples)
    radius = 1.0 / math.sin(phi)
    return np.column_stack([-1.0 / math.tan(phi) + radius * np.cos(theta), radius * np.sin(theta)])


def region_boundary(region: TurnRegion, side: Side = Side.RIGHT, samples: int = 64) -> list[Point]:
    """Sampled boundary arc of the right or left part, running from A to B."""
    if not 0.0 < region.phi < math.pi:
        raise UnboundedRegionError("the region has no bounded boundary for phi >= pi")
    if samples < 2:
        raise ValueError("need at least two samples")
    arc = _canonical_arc(region.phi, samples)
    if side is Side.LEFT:
        arc[:, 0] = -arc[:, 0]
    world = CanonicalFrame.from_chord(region.A, region.B).inverse(arc)
    pts = [Point(float(x), float(y)) for x, y in world]
    pts[0], pts[-1] = region.A, region.B
    return pts


def canonical_half_extents(phi: float) -> tuple[float, float]:
    """Half width and half height of the canonical box around cl S."""
    half_height = 1.0 if phi <= math.pi / 2 else 1.0 / math.sin(phi)
    return math.tan(phi / 2.0), half_height


def region_bounding_box(region: TurnRegion) -> tuple[Point, Point]:
    """Axis-aligned (lower, upper) corners of a box containing cl S(A, B, phi)."""
    if not 0.0 < region.phi < math.pi:
        raise UnboundedRegionError("the region is unbounded for phi >= pi")
    w, h = canonical_half_extents(region.phi)
    corners = np.array([[-w, -h], [w, -h], [w, h], [-w, h]])
    world = CanonicalFrame.from_chord(region.A, region.B).inverse(corners)
    lo, hi = world.min(axis=0), world.max(axis=0)
    return Point(float(lo[0]), float(lo[1])), Point(float(hi[0]), float(hi[1]))


def cone_contains(cone: Cone, C: Sequence[float], tol: float = EPS_ANGLE) -> bool:
    rel = (C[0] - cone.apex[0], C[1] - cone.apex[1])
    return abs(oriented_angle(rel, cone.axis)) <= cone.half_angle + tol


def lipschitz_estimate(phi: float, s: float, samples: int = 400) -> float:
    """Sampled max of |dPsi/dc1| + |dPsi/dc2| over the canonical region cut at distance s.

    The sampling covers a samples x samples grid over the canonical box plus
    the boundary curves of the truncated set, where the maximum of this
    subharmonic quantity is attained.
    """
    if not (0.0 < phi < math.pi and s > 0.0):
        raise ValueError("need 0 < phi < pi and s > 0")
    w, h = canonical_half_extents(phi)
    xs = np.linspace(-w, w, samples)
    ys = np.linspace(-h, h, samples)
    grid = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
    angles = np.linspace(0.0, 2.0 * math.pi, 8 * samples, endpoint=False)
    ring = s * np.column_stack([np.cos(angles), np.sin(angles)])
    arc = _canonical_arc(phi, 4 * samples)
    mirrored = arc * np.array([-1.0, 1.0])
    pts = np.concatenate([grid, ring + (0.0, -1.0), ring + (0.0, 1.0), arc, mirrored])
    keep = (np.abs(psi_array(pts)) <= phi + EPS_ANGLE)
    keep &= np.hypot(pts[:, 0], pts[:, 1] + 1.0) >= s * (1.0 - 1e-12)
    keep &= np.hypot(pts[:, 0], pts[:, 1] - 1.0) >= s * (1.0 - 1e-12)
    if not keep.any():
        raise GeometryError(f"truncated region is empty for s={s}")
    return float(_psi_gradient_l1(pts[keep]).max())
