"""Grid lattices, admissible turn sequences on them, and the shrink map.

An admissible sequence (B1, ..., Bn) makes the polyline A, B1, ..., Bn, B
turn by at most phi at every interior vertex, with consecutive vertices
distinct.  Enumeration extends sequences level by level: B1 must lie in
S(A, B, n phi), and each later point must lie in
S(B(i), B, (n - i) phi) intersected with the cone of half angle phi around
the current heading.  The region factors only prune; the turn bounds are
always checked directly, so the result is exactly the admissible set.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .angle_core import (
    EPS_ANGLE,
    DegenerateError,
    GeometryError,
    Point,
    as_point,
    distance,
    oriented_angle_array,
    turn_angle,
)
from .regions import (
    Closure,
    Cone,
    TurnRegion,
    cone_contains,
    region_boundary,
    region_contains,
    region_contains_array,
    Side,
)


class GridError(GeometryError):
    pass


class ResourceCapError(RuntimeError):
    """The estimated enumeration work exceeds the configured cap."""


class ShrinkError(GeometryError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Lattice q + j * tau inside the rectangle [q, p]."""

    q: Point
    p: Point
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "q", as_point(self.q))
        object.__setattr__(self, "p", as_point(self.p))
        if not (self.q.c1 < self.p.c1 and self.q.c2 < self.p.c2):
            raise GridError(f"need q < p componentwise, got q={self.q}, p={self.p}")
        if not 0.0 < self.tau <= min(self.p.c1 - self.q.c1, self.p.c2 - self.q.c2):
            raise GridError(f"tau={self.tau} must be positive and fit inside the box")

    def shape(self) -> tuple[int, int]:
        m1 = int(math.floor((self.p.c1 - self.q.c1) / self.tau + 1e-9)) + 1
        m2 = int(math.floor((self.p.c2 - self.q.c2) / self.tau + 1e-9)) + 1
        return m1, m2

    def array(self) -> np.ndarray:
        """Lattice points, shape (N, 2), sorted by (c1, c2)."""
        m1, m2 = self.shape()
        j1, j2 = np.meshgrid(np.arange(m1), np.arange(m2), indexing="ij")
        xs = self.q.c1 + j1.ravel() * self.tau
        ys = self.q.c2 + j2.ravel() * self.tau
        return np.column_stack([xs, ys])


def grid_points(grid: GridSpec) -> list[Point]:
    return [Point(float(x), float(y)) for x, y in grid.array()]


@dataclass
class DiscreteSequenceSet:
    """Admissible grid sequences, stored as an (m, n, 2) array in canonical order."""

    points: np.ndarray
    A: Point
    B: Point
    n: int
    phi: float
    grid: GridSpec | None = None

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def as_set(self) -> set[tuple[Point, ...]]:
        return {tuple(Point(float(x), float(y)) for x, y in seq) for seq in self.points}

    def as_list(self) -> list[tuple[Point, ...]]:
        return [tuple(Point(float(x), float(y)) for x, y in seq) for seq in self.points]


def canonical_order(points: np.ndarray) -> np.ndarray:
    """Permutation sorting (m, n, 2) sequences lexicographically by coordinates."""
    flat = points.reshape(points.shape[0], -1)
    return np.lexsort(flat.T[::-1])


def sequence_is_admissible(seq: Sequence[Sequence[float]], A: Sequence[float], B: Sequence[float],
                           phi: float, tol: float = EPS_ANGLE, strict: bool = False) -> bool:
    """Every turn of A, seq..., B lies in [-phi, phi] and consecutive vertices differ.

    With ``strict`` the turns must also be nonzero.
    """
    verts = [as_point(A), *(as_point(c) for c in seq), as_point(B)]
    for i in range(1, len(verts) - 1):
        try:
            a = abs(turn_angle(verts[i - 1], verts[i], verts[i + 1]))
        except DegenerateError:
            return False
        if a > phi + tol or (strict and a <= tol):
            return False
    return all(verts[i] != verts[i + 1] for i in range(len(verts) - 1))


def admissible_next_region(i: int, A: Sequence[float], B: Sequence[float], n: int, phi: float,
                           prev2: Sequence[float] | None, prev1: Sequence[float],
                           tol: float = EPS_ANGLE) -> Callable[[Sequence[float]], bool]:
    """Membership predicate for B(i+1) given B(i-1) = prev2 and B(i) = prev1."""
    if not 1 <= i <= n - 1:
        raise IndexError(f"level i={i} out of range for n={n}")
    prev2 = as_point(A if prev2 is None else prev2)
    prev1 = as_point(prev1)
    last = i == n - 1
    region = TurnRegion(prev1, B, (n - i) * phi)
    closure = Closure.CLOSED if last else Closure.OPEN
    axis = prev1 - prev2
    cone = Cone(prev1, axis, phi) if axis != (0.0, 0.0) else None

    def contains(C: Sequence[float]) -> bool:
        C = as_point(C)
        if last and (C == as_point(A) or C == as_point(B)):
            return False
        in_cone = cone is not None and cone_contains(cone, C, tol)
        return in_cone and region_contains(region, C, closure, tol)

    return contains


@dataclass(frozen=True)
class _Problem:
    A: tuple[float, float]
    B: tuple[float, float]
    n: int
    phi: float
    tol: float
    strict: bool
    pts: np.ndarray = field(compare=False)

    @property
    def slack(self) -> float:
        return (self.n + 1) * self.tol + 1e-12


def _turn_ok(a: np.ndarray, prob: _Problem) -> np.ndarray:
    mag = np.abs(a)
    ok = mag <= prob.phi + prob.tol
    if prob.strict:
        ok &= mag > prob.tol
    return ok


def _first_level(prob: _Problem) -> np.ndarray:
    pts, A, B = prob.pts, np.asarray(prob.A), np.asarray(prob.B)
    if prob.n == 1:
        mask = _turn_ok(oriented_angle_array(B - pts, pts - A), prob)
    else:
        mask = region_contains_array(A, B, prob.n * prob.phi, pts, Closure.CLOSED, prob.slack)
    not_end = ~np.all(pts == A, axis=1) & ~np.all(pts == B, axis=1)
    return np.flatnonzero(mask & not_end)


def _candidates(prob: _Problem, level: int, prev2: np.ndarray, prev1: np.ndarray) -> np.ndarray:
    """Indices admissible as B(level+1) after prev2, prev1 (1 <= level <= n-1)."""
    pts, B = prob.pts, np.asarray(prob.B)
    mask = _turn_ok(oriented_angle_array(pts - prev1, prev1 - prev2), prob)
    mask &= ~np.all(pts == prev1, axis=1)
    if level == prob.n - 1:
        mask &= ~np.all(pts == B, axis=1)
        mask &= _turn_ok(oriented_angle_array(B - pts, pts - prev1), prob)
    else:
        idx = np.flatnonzero(mask)
        keep = region_contains_array(prev1, B, (prob.n - level) * prob.phi, pts[idx],
                                     Closure.CLOSED, prob.slack)
        return idx[keep]
    return np.flatnonzero(mask)


def _completions(prob: _Problem, level: int, prev2: int, prev1: int,
                 memo: dict[tuple[int, int, int], np.ndarray]) -> np.ndarray:
    """Suffixes (B(level+1), ..., B(n)) as index rows; prev2 = -1 stands for A."""
    key = (level, prev2, prev1)
    if key in memo:
        return memo[key]
    p2 = np.asarray(prob.A) if prev2 < 0 else prob.pts[prev2]
    nxt = _candidates(prob, level, p2, prob.pts[prev1])
    if level == prob.n - 1:
        out = nxt.reshape(-1, 1)
    else:
        parts = []
        for k in nxt:
            tail = _completions(prob, level + 1, prev1, int(k), memo)
            if len(tail):
                parts.append(np.column_stack([np.full(len(tail), k), tail]))
        out = np.concatenate(parts) if parts else np.empty((0, prob.n - level), dtype=np.int64)
    memo[key] = out
    return out


def _enumerate_chunk(prob: _Problem, firsts: np.ndarray) -> np.ndarray:
    memo: dict[tuple[int, int, int], np.ndarray] = {}
    rows = []
    for b1 in firsts:
        b1 = int(b1)
        if prob.n == 1:
            rows.append(np.array([[b1]]))
            continue
        tail = _completions(prob, 1, -1, b1, memo)
        if len(tail):
            rows.append(np.column_stack([np.full(len(tail), b1), tail]))
    return np.concatenate(rows) if rows else np.empty((0, prob.n), dtype=np.int64)


def _split(items: np.ndarray, parts: int) -> list[np.ndarray]:
    return [chunk for chunk in np.array_split(items, parts) if len(chunk)]


def enumeration_work(A, B, n: int, phi: float, grid: GridSpec) -> float:
    """Rough work estimate: first-level candidates times grid size per later level."""
    pts = grid.array()
    first = int(region_contains_array(A, B, n * phi, pts, Closure.CLOSED, 1e-9).sum())
    return float(first) * float(len(pts)) ** (n - 1)


def enumerate_index_rows(A, B, n: int, phi: float, grid: GridSpec, tol: float = EPS_ANGLE,
                         strict: bool = False, workers: int = 1,
                         max_work: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Lattice points and the sorted (m, n) index rows of all admissible sequences."""
    A, B = as_point(A), as_point(B)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if A == B:
        raise DegenerateError("A and B coincide")
    if not n * phi < math.pi:
        raise GeometryError(f"n * phi = {n * phi} must be below pi")
    if max_work is not None:
        work = enumeration_work(A, B, n, phi, grid)
        if work > max_work:
            raise ResourceCapError(f"estimated work {work:.3g} exceeds cap {max_work:.3g}")
    pts = grid.array()
    prob = _Problem(tuple(A), tuple(B), n, phi, tol, strict, pts)
    firsts = _first_level(prob)
    if workers <= 1 or len(firsts) < 2:
        rows = _enumerate_chunk(prob, firsts)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_enumerate_chunk, [prob] * workers, _split(firsts, workers)))
        rows = np.concatenate(parts) if parts else np.empty((0, n), dtype=np.int64)
    rows = rows.astype(np.int64).reshape(-1, n)
    rows = rows[np.lexsort(rows.T[::-1])] if len(rows) else rows
    return pts, rows


def enumerate_sequences(A, B, n: int, phi: float, grid: GridSpec, tol: float = EPS_ANGLE,
                        strict: bool = False, workers: int = 1,
                        max_work: float | None = None) -> DiscreteSequenceSet:
    """All admissible n-sequences on the lattice of ``grid``, canonically ordered."""
    pts, rows = enumerate_index_rows(A, B, n, phi, grid, tol, strict, workers, max_work)
    seqs = pts[rows] if len(rows) else np.empty((0, n, 2))
    return DiscreteSequenceSet(seqs, as_point(A), as_point(B), n, phi, grid)


def separation(seq: Sequence[Sequence[float]], A: Sequence[float], B: Sequence[float]) -> float:
    """Minimum pairwise distance among A, the sequence points, and B."""
    verts = [A, *seq, B]
    return min(distance(u, v) for u, v in combinations(verts, 2))


def region_diameter(A: Sequence[float], B: Sequence[float], phi: float, samples: int = 721) -> float:
    """Upper estimate of diam cl S(A, B, phi) for 0 < phi < pi."""
    chord = distance(A, B)
    if phi <= math.pi / 2:
        return chord
    region = TurnRegion(as_point(A), as_point(B), phi)
    pts = np.array(region_boundary(region, Side.RIGHT, samples) + region_boundary(region, Side.LEFT, samples))
    diff = pts[:, None, :] - pts[None, :, :]
    sampled = float(np.sqrt((diff ** 2).sum(axis=-1)).max())
    # sampled chords underestimate by O(h^2) relative to the radius
    radius = chord / (2.0 * math.sin(phi))
    step = 2.0 * phi / (samples - 1)
    return sampled + radius * step * step


@dataclass(frozen=True)
class ShrinkParams:
    s: float
    d: float
    kappa: float
    omega: float
    theta: float


def shrink_constants(s: float, d: float, phi: float, n: int) -> ShrinkParams:
    if not d >= s > 0.0:
        raise ShrinkError(f"need d >= s > 0, got s={s}, d={d}")
    if not 0.0 < phi < math.pi / 2:
        raise ShrinkError(f"phi must lie in (0, pi/2), got {phi}")
    kappa = d / s
    omega = math.sin(phi) / max(2.02 * (n + kappa) ** 2, 8.32 * kappa * (kappa + 1.0))
    theta = max(5.0, 3.0 * (n + kappa), kappa / 0.17)
    return ShrinkParams(s=s, d=d, kappa=kappa, omega=omega, theta=theta)


def slide_weights(verts: Sequence[Point], start: int, stop: int, s: float) -> list[float]:
    """Weights omega_0, omega_1, ... for vertices start..stop-1 of A, B1, ..., Bn, B.

    omega_0 = 1 and omega_m = k_{m+1} omega_{m-1} / (omega_{m-1} + k_m), with
    k_m the length of the m-th edge of the run divided by s.
    """
    k = [distance(verts[start + m - 1], verts[start + m - 2]) / s for m in range(1, stop - start + 1)]
    omega = [1.0]
    for m in range(1, stop - start):
        omega.append(k[m] * omega[m - 1] / (omega[m - 1] + k[m - 1]))
    return omega


def _slide(verts: Sequence[Point], weights: Sequence[float], t: float) -> list[Point]:
    """Move interior vertex i forward along its outgoing edge by t * weights[i-1]."""
    out = []
    for i in range(1, len(verts) - 1):
        a, b = verts[i], verts[i + 1]
        length = distance(a, b)
        step = t * weights[i - 1] / length
        out.append(Point(a[0] + step * (b[0] - a[0]), a[1] + step * (b[1] - a[1])))
    return out


def _turns(verts: Sequence[Point]) -> list[float]:
    return [turn_angle(verts[i - 1], verts[i], verts[i + 1]) for i in range(1, len(verts) - 1)]


def _run_weights(verts: Sequence[Point], active: Sequence[bool], s: float) -> list[float]:
    """Restart the weight schedule at the first vertex of every run of active vertices."""
    n = len(verts) - 2
    weights = [0.0] * n
    i = 1
    while i <= n:
        if not active[i - 1]:
            i += 1
            continue
        j = i
        while j <= n and active[j - 1]:
            j += 1
        for m, w in enumerate(slide_weights(verts, i, j, s)):
            weights[i + m - 1] = w
        i = j
    return weights


def shrink_map(W: Sequence[Sequence[float]], A: Sequence[float], B: Sequence[float], t: float,
               params: ShrinkParams, phi: float, n: int | None = None) -> list[Point]:
    """Slide each interior vertex along its outgoing edge to gain a turn margin omega * t.

    Vertices whose turn already has the margin stay put.  Every run of
    consecutive vertices that needs the margin gets the weight schedule
    started afresh at its first vertex.  A vertex pushed over the bound by
    its neighbours joins the runs and the schedule is rebuilt.
    """
    verts = [as_point(A), *(as_point(c) for c in W), as_point(B)]
    n = len(verts) - 2 if n is None else n
    if n != len(verts) - 2:
        raise ShrinkError(f"sequence has {len(verts) - 2} points, expected {n}")
    if not 0.0 < phi < math.pi / 2:
        raise ShrinkError(f"phi must lie in (0, pi/2), got {phi}")
    if not 0.0 < t <= params.s / params.theta * (1.0 + 1e-12):
        raise ShrinkError(f"t={t} must lie in (0, s/theta = {params.s / params.theta}]")
    if separation(verts[1:-1], verts[0], verts[-1]) < params.s * (1.0 - 1e-12):
        raise ShrinkError("input sequence is not s-separated")
    bound = phi - params.omega * t
    active = [abs(a) > bound for a in _turns(verts)]
    for _ in range(n + 1):
        moved = _slide(verts, _run_weights(verts, active, params.s), t)
        over = [abs(a) > bound for a in _turns([verts[0], *moved, verts[-1]])]
        grow = [o and not a for o, a in zip(over, active)]
        if not any(grow):
            break
        active = [a or g for a, g in zip(active, grow)]
    return moved
