"""Closed-form witness polylines with bounded turns.

``solve_problem_o`` splits one total rotation into n equal turns joined by
equal segments.  ``construct_polyline`` builds an admissible n-turn path from
A to B through any feasible first turn point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .angle_core import (
    EPS_ANGLE,
    DegenerateError,
    GeometryError,
    LineSide,
    Point,
    as_point,
    distance,
    oriented_angle,
    side_of_line,
    turn_angle,
)
from .regions import Closure, TurnRegion, region_contains

MAX_HALVINGS = 60


class InfeasibleInputError(GeometryError):
    pass


class InfeasibleStartError(GeometryError):
    pass


class UnsupportedRegimeError(GeometryError):
    pass


@dataclass(frozen=True)
class Polyline:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(as_point(v) for v in self.vertices))

    @property
    def interior(self) -> tuple[Point, ...]:
        return self.vertices[1:-1]

    def to_json(self) -> list[list[float]]:
        return [[v.c1, v.c2] for v in self.vertices]


@dataclass(frozen=True)
class ProblemOInput:
    A: Point
    B: Point
    G: Point
    t: float
    n: int

    @property
    def psi(self) -> float:
        return oriented_angle(self.B - self.G, self.G - self.A)

    @property
    def C(self) -> Point:
        return self.A + (self.G - self.A).scale(self.t)

    def check(self) -> None:
        A, B, G = (as_point(p) for p in (self.A, self.B, self.G))
        if self.n < 2:
            raise ValueError(f"Problem O needs n >= 2, got {self.n}")
        if A == B or A == G or B == G:
            raise InfeasibleInputError("A, B, G must be pairwise distinct")
        if not 0.0 < self.t < 1.0:
            raise InfeasibleInputError(f"t must lie in (0, 1), got {self.t}")
        if not 0.0 < self.psi < math.pi:
            raise InfeasibleInputError(f"turn at G must lie in (0, pi), got {self.psi}")
        if not distance(B, G) > distance(self.C, G):
            raise InfeasibleInputError("need |B - G| > |C - G|")


@dataclass(frozen=True)
class ValidationReport:
    turn_angles: list[float]
    max_abs_turn: float
    min_pair_separation: float
    zero_turn_indices: list[int] = field(default_factory=list)
    ok: bool = False


def rotation_matrix(theta: float) -> np.ndarray:
    """Counterclockwise rotation by ``theta``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def equal_turn_step(total: float, t: float, n: int) -> float:
    """Segment length, in units of |G - A|, of the equal-turn chain."""
    alpha = total / n
    return 2.0 * (1.0 - t) * math.cos(total / 2.0) * math.sin(alpha / 2.0) / math.sin((total - alpha) / 2.0)


def _equal_turn_chain(start: Point, U: Point, t: float, n: int, total: float) -> list[Point]:
    """Points start + lam * sum_{j<k} R(j alpha) U for k = 2..n.

    A negative ``total`` gives the mirror image (clockwise rotations).
    """
    alpha = total / n
    lam = equal_turn_step(total, t, n)
    out, x, y = [], start[0], start[1]
    for j in range(1, n):
        c, s = math.cos(j * alpha), math.sin(j * alpha)
        x += lam * (c * U[0] - s * U[1])
        y += lam * (s * U[0] + c * U[1])
        out.append(Point(x, y))
    return out


def solve_problem_o(inp: ProblemOInput) -> list[Point]:
    """The points B(2), ..., B(n) of the equal-turn, equal-length chain from C to [B, G]."""
    inp.check()
    U = inp.G - inp.A
    return _equal_turn_chain(inp.C, U, inp.t, inp.n, inp.psi)


def _start_is_feasible(A: Point, B: Point, n: int, phi: float, B1: Point, tol: float) -> bool:
    if B1 == A or B1 == B:
        return False
    if n == 1:
        return region_contains(TurnRegion(A, B, phi), B1, Closure.CLOSED, tol)
    return region_contains(TurnRegion(A, B, n * phi), B1, Closure.OPEN, tol)


def _off_chord(A: Point, B: Point, n: int, phi: float, B1: Point) -> list[Point]:
    """Vertices after B1 when B1 is off the line AB: one equal-turn chain."""
    base = B1 - A
    s = min(distance(B1, B), base.norm())
    sign = 1.0 if oriented_angle(B - B1, base) > 0.0 else -1.0
    tb = s / (4.0 * base.norm())
    for _ in range(MAX_HALVINGS):
        G = B1 + base.scale(tb)
        total = oriented_angle(B - G, G - A)
        if distance(G, B1) < s / 2.0 and 0.0 < sign * total < n * phi:
            break
        tb /= 2.0
    else:
        raise InfeasibleStartError("no admissible extension point found along A -> B1")
    t1 = 1.0 / (1.0 + tb)
    return _equal_turn_chain(B1, G - A, t1, n, total)


def _on_chord(A: Point, B: Point, n: int, phi: float, B1: Point, tol: float) -> list[Point]:
    """Vertices after B1 when B1 lies on (A, B): turn left by phi/2, then recurse."""
    length = distance(A, B)
    ux, uy = (B[0] - A[0]) / length, (B[1] - A[1]) / length
    delta = phi / 2.0
    c, s = math.cos(delta), math.sin(delta)
    heading = Point(c * ux - s * uy, s * ux + c * uy)
    r = min(distance(A, B1), distance(B1, B)) / 4.0
    for _ in range(MAX_HALVINGS):
        B2 = B1 + heading.scale(r)
        if _start_is_feasible(B1, B, n - 1, phi, B2, tol):
            break
        r /= 2.0
    else:
        raise InfeasibleStartError("no admissible second vertex found next to the chord")
    return list(construct_polyline(B1, B, n - 1, phi, B2, tol).vertices[1:-1])


def construct_polyline(A: Sequence[float], B: Sequence[float], n: int, phi: float,
                       B1: Sequence[float], tol: float = EPS_ANGLE) -> Polyline:
    """An admissible path A, B1, ..., B(n), B with every |turn| <= phi."""
    A, B, B1 = as_point(A), as_point(B), as_point(B1)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if A == B:
        raise DegenerateError("A and B coincide")
    if not n * phi < math.pi:
        raise UnsupportedRegimeError(f"n * phi = {n * phi} must be below pi")
    if not _start_is_feasible(A, B, n, phi, B1, tol):
        raise InfeasibleStartError(f"B1 = {tuple(B1)} is outside the admissible region")
    if n == 1:
        rest = []
    elif side_of_line(A, B, B1) is LineSide.ON_LINE:
        rest = _on_chord(A, B, n, phi, B1, tol)
    else:
        rest = _off_chord(A, B, n, phi, B1)
    return Polyline((A, B1, *rest, B))


def validate_polyline(p: Polyline, phi: float, tol: float = EPS_ANGLE) -> ValidationReport:
    v = p.vertices
    if len(v) < 2:
        raise ValueError("a polyline needs at least two vertices")
    distinct = all(v[i] != v[i + 1] for i in range(len(v) - 1))
    turns = []
    for i in range(1, len(v) - 1):
        try:
            turns.append(turn_angle(v[i - 1], v[i], v[i + 1]))
        except DegenerateError:
            turns.append(math.nan)
    separation = min((distance(a, b) for a, b in combinations(v, 2)), default=math.inf)
    max_abs = max((abs(a) for a in turns), default=0.0)
    zero = [i + 1 for i, a in enumerate(turns) if abs(a) <= tol]
    ok = distinct and all(abs(a) <= phi + tol for a in turns)
    return ValidationReport(turns, max_abs, separation, zero, ok)


def vertex_region_check(p: Polyline, phi: float, tol: float = EPS_ANGLE) -> bool:
    """Interior vertices lie in S(A, B, n phi) and all vertices are pairwise distinct."""
    v = p.vertices
    A, B, n = v[0], v[-1], len(v) - 2
    if A == B or len(set(v)) != len(v):
        return False
    if n == 1:
        return region_contains(TurnRegion(A, B, phi), v[1], Closure.CLOSED, tol)
    region = TurnRegion(A, B, n * phi)
    return all(region_contains(region, c, Closure.OPEN, tol) for c in v[1:-1])
