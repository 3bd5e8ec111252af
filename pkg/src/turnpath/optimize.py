"""Path cost, discrete minimization over admissible grid sequences, and the tau sweep.

Distances between sequences use the sup-norm
``||W - V|| = max_i max(|w_i1 - v_i1|, |w_i2 - v_i2|)``.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .angle_core import EPS_ANGLE, DegenerateError, Point, as_point, oriented_angle_array
from .enumeration import (
    DiscreteSequenceSet,
    GridSpec,
    _Problem,
    _candidates,
    _first_level,
    _split,
    enumerate_sequences,
)
from .regions import TurnRegion, region_bounding_box

TIE_RTOL = 1e-12


@dataclass(frozen=True)
class CostModel:
    """length_weight * total length + sum of turn costs + sum of point surcharges.

    ``turn_cost`` and ``surcharge`` act elementwise on numpy arrays of
    |turn| values and of (m, 2) points.  ``sequence_cost``, when given, is an
    extra whole-sequence term that makes the cost non-separable.
    """

    length_weight: float = 1.0
    turn_weight: float = 0.0
    turn_cost: Callable[[np.ndarray], np.ndarray] | None = None
    surcharge: Callable[[np.ndarray], np.ndarray] | None = None
    sequence_cost: Callable[[np.ndarray], float] | None = None

    @property
    def separable(self) -> bool:
        return self.sequence_cost is None

    def turn_term(self, abs_turns: np.ndarray) -> np.ndarray:
        if self.turn_cost is not None:
            return np.asarray(self.turn_cost(abs_turns), dtype=float)
        return self.turn_weight * abs_turns

    def point_term(self, pts: np.ndarray) -> np.ndarray:
        if self.surcharge is None:
            return np.zeros(pts.shape[:-1])
        return np.asarray(self.surcharge(pts), dtype=float)


@dataclass
class Solution:
    sequence: tuple[Point, ...] | None
    objective: float | None
    tau: float | None
    stats: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.sequence is not None

    def to_json(self) -> dict:
        seq = None if self.sequence is None else [[p.c1, p.c2] for p in self.sequence]
        return {"found": self.found, "sequence": seq, "objective": self.objective, "tau": self.tau,
                "candidates": self.stats.get("candidates")}


@dataclass(frozen=True)
class ConvergenceRow:
    tau: float
    set_size: int
    min_objective: float
    hausdorff_to_reference: float
    flagged: bool = False


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]

    def to_csv(self) -> str:
        lines = ["tau,set_size,min_objective,hausdorff_to_reference"]
        for r in self.rows:
            lines.append(f"{r.tau!r},{r.set_size},{r.min_objective!r},{r.hausdorff_to_reference!r}")
        return "\n".join(lines) + "\n"


def objective_batch(cost: CostModel, A: Sequence[float], B: Sequence[float], seqs: np.ndarray) -> np.ndarray:
    """Objective of each sequence in an (m, n, 2) array."""
    seqs = np.asarray(seqs, dtype=float)
    m = seqs.shape[0]
    ends = np.broadcast_to(np.asarray(A, dtype=float), (m, 1, 2)), np.broadcast_to(np.asarray(B, dtype=float), (m, 1, 2))
    verts = np.concatenate([ends[0], seqs, ends[1]], axis=1)
    edges = np.diff(verts, axis=1)
    if np.any(np.all(edges == 0.0, axis=-1)):
        raise DegenerateError("coincident consecutive vertices")
    lengths = np.hypot(edges[..., 0], edges[..., 1]).sum(axis=1)
    turns = np.abs(oriented_angle_array(edges[:, 1:], edges[:, :-1]))
    total = cost.length_weight * lengths + cost.turn_term(turns).sum(axis=1) + cost.point_term(seqs).sum(axis=1)
    if cost.sequence_cost is not None:
        total = total + np.array([cost.sequence_cost(s) for s in seqs])
    return total


def objective(cost: CostModel, A: Sequence[float], B: Sequence[float], seq: Sequence[Sequence[float]]) -> float:
    arr = np.asarray([[list(p) for p in seq]], dtype=float).reshape(1, -1, 2)
    return float(objective_batch(cost, A, B, arr)[0])


def _tie_threshold(best: float) -> float:
    return best + TIE_RTOL * max(1.0, abs(best))


def _pick(points: np.ndarray, values: np.ndarray) -> int:
    """Index of the lexicographically smallest sequence whose value ties the minimum."""
    near = np.flatnonzero(values <= _tie_threshold(values.min()))
    order = np.lexsort(points[near].reshape(len(near), -1).T[::-1])
    return int(near[order[0]])


def solve_on_set(cost: CostModel, S: DiscreteSequenceSet) -> Solution:
    """Exhaustive minimum over an enumerated set."""
    tau = S.grid.tau if S.grid is not None else None
    if len(S) == 0:
        return Solution(None, None, tau, {"candidates": 0})
    values = objective_batch(cost, S.A, S.B, S.points)
    k = _pick(S.points, values)
    seq = tuple(Point(float(x), float(y)) for x, y in S.points[k])
    return Solution(seq, objective(cost, S.A, S.B, seq), tau, {"candidates": len(S)})


class _LevelDP:
    """Cost-to-go over states (level, prev2, prev1) for separable costs."""

    def __init__(self, prob: _Problem, cost: CostModel):
        self.prob, self.cost = prob, cost
        self.memo: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray]] = {}

    def _point(self, idx: int) -> np.ndarray:
        return np.asarray(self.prob.A) if idx < 0 else self.prob.pts[idx]

    def step(self, level: int, prev2: int, prev1: int) -> tuple[np.ndarray, np.ndarray]:
        """Candidates for B(level+1) and their total cost-to-go."""
        key = (level, prev2, prev1)
        if key in self.memo:
            return self.memo[key]
        prob, cost = self.prob, self.cost
        p2, p1 = self._point(prev2), self._point(prev1)
        nxt = _candidates(prob, level, p2, p1)
        pts = prob.pts[nxt]
        out = pts - p1
        value = cost.length_weight * np.hypot(out[:, 0], out[:, 1])
        value = value + cost.turn_term(np.abs(oriented_angle_array(out, p1 - p2)))
        value = value + cost.point_term(pts)
        if level == prob.n - 1:
            B = np.asarray(prob.B)
            value = value + cost.turn_term(np.abs(oriented_angle_array(B - pts, out)))
            value = value + cost.length_weight * np.hypot(*(B - pts).T)
        else:
            tails = np.array([self.best(level + 1, prev1, int(k)) for k in nxt])
            value = value + tails if len(nxt) else value
        self.memo[key] = (nxt, value)
        return nxt, value

    def best(self, level: int, prev2: int, prev1: int) -> float:
        _, value = self.step(level, prev2, prev1)
        return float(value.min()) if len(value) else math.inf

    def first_values(self, firsts: np.ndarray) -> np.ndarray:
        prob, cost = self.prob, self.cost
        A, B = np.asarray(prob.A), np.asarray(prob.B)
        pts = prob.pts[firsts]
        value = cost.length_weight * np.hypot(*(pts - A).T) + cost.point_term(pts)
        if prob.n == 1:
            value = value + cost.turn_term(np.abs(oriented_angle_array(B - pts, pts - A)))
            return value + cost.length_weight * np.hypot(*(B - pts).T)
        return value + np.array([self.best(1, -1, int(k)) for k in firsts])


def _first_values_chunk(prob: _Problem, cost: CostModel, firsts: np.ndarray) -> np.ndarray:
    return _LevelDP(prob, cost).first_values(firsts)


def _smallest_within(indices: np.ndarray, values: np.ndarray, budget: float) -> int:
    ok = indices[values <= budget]
    return int(ok.min())


def solve_discrete(A, B, n: int, phi: float, grid: GridSpec, cost: CostModel | None = None,
                   tol: float = EPS_ANGLE, strict: bool = False, workers: int = 1) -> Solution:
    """Minimum of the cost over all admissible sequences on the lattice.

    Ties within a relative 1e-12 resolve to the lexicographically smallest
    sequence.  An empty admissible set gives a Solution with ``found`` False.
    """
    cost = cost or CostModel()
    start = time.perf_counter()
    if not cost.separable:
        sol = solve_on_set(cost, enumerate_sequences(A, B, n, phi, grid, tol, strict, workers))
        sol.stats["wall_time"] = time.perf_counter() - start
        return sol
    A, B = as_point(A), as_point(B)
    if not n * phi < math.pi:
        raise ValueError(f"n * phi = {n * phi} must be below pi")
    prob = _Problem(tuple(A), tuple(B), n, phi, tol, strict, grid.array())
    firsts = _first_level(prob)
    if workers <= 1 or len(firsts) < 2:
        values = _first_values_chunk(prob, cost, firsts)
    else:
        chunks = _split(firsts, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_first_values_chunk, [prob] * len(chunks), [cost] * len(chunks), chunks))
        values = np.concatenate(parts)
    stats = {"candidates": int(len(firsts))}
    finite = np.isfinite(values)
    if not finite.any():
        stats["wall_time"] = time.perf_counter() - start
        return Solution(None, None, grid.tau, stats)
    budget = _tie_threshold(float(values[finite].min()))
    dp = _LevelDP(prob, cost)
    b1 = _smallest_within(firsts, values, budget)
    path = [b1]
    spent = float(values[np.flatnonzero(firsts == b1)[0]]) - (dp.best(1, -1, b1) if n > 1 else 0.0)
    prev2 = -1
    for level in range(1, n):
        nxt, value = dp.step(level, prev2, path[-1])
        k = _smallest_within(nxt, value, budget - spent)
        pos = int(np.flatnonzero(nxt == k)[0])
        step_only = value[pos] - (dp.best(level + 1, path[-1], k) if level < n - 1 else 0.0)
        spent += float(step_only)
        prev2 = path[-1]
        path.append(k)
    seq = tuple(Point(float(x), float(y)) for x, y in prob.pts[path])
    stats["wall_time"] = time.perf_counter() - start
    return Solution(seq, objective(cost, A, B, seq), grid.tau, stats)


def _as_array(S) -> np.ndarray:
    pts = S.points if isinstance(S, DiscreteSequenceSet) else np.asarray(S, dtype=float)
    return pts.reshape(pts.shape[0], -1)


def sequence_distance(W: Sequence[Sequence[float]], V: Sequence[Sequence[float]]) -> float:
    w = np.asarray(W, dtype=float).ravel()
    v = np.asarray(V, dtype=float).ravel()
    return float(np.abs(w - v).max()) if w.size else 0.0


def point_to_set_distance(W: Sequence[Sequence[float]], S) -> float:
    Y = _as_array(S)
    if len(Y) == 0:
        raise ValueError("distance to an empty set")
    w = np.asarray(W, dtype=float).ravel()
    return float(np.abs(Y - w).max(axis=1).min())


def directed_hausdorff(X, Y) -> float:
    """Largest distance from a member of X to the set Y (the asymmetric deviation)."""
    x, y = _as_array(X), _as_array(Y)
    if len(x) == 0 or len(y) == 0:
        raise ValueError("Hausdorff distance of an empty set")
    dist, _ = cKDTree(y).query(x, k=1, p=np.inf)
    return float(np.max(dist))


def hausdorff(X, Y) -> float:
    return max(directed_hausdorff(X, Y), directed_hausdorff(Y, X))


def sweep_box(A, B, n: int, phi: float, pad: float) -> tuple[Point, Point]:
    lo, hi = region_bounding_box(TurnRegion(as_point(A), as_point(B), n * phi))
    return Point(lo.c1 - pad, lo.c2 - pad), Point(hi.c1 + pad, hi.c2 + pad)


def convergence_study(A, B, n: int, phi: float, cost: CostModel | None, taus: Sequence[float],
                      box: tuple[Point, Point] | None = None, tol: float = EPS_ANGLE,
                      workers: int = 1) -> ConvergenceReport:
    """Minimum objective and distance to the finest set over nested grids tau_k = tau_0 / 2^k."""
    cost = cost or CostModel()
    taus = list(taus)
    if len(taus) < 2:
        raise ValueError("a sweep needs at least two levels")
    for a, b in zip(taus, taus[1:]):
        if not math.isclose(b, a / 2.0, rel_tol=1e-12):
            raise ValueError("taus must halve at every level")
    taus = [taus[0] / 2.0 ** k for k in range(len(taus))]
    q, p = box or sweep_box(A, B, n, phi, taus[0])
    sets = [enumerate_sequences(A, B, n, phi, GridSpec(q, p, tau), tol, workers=workers) for tau in taus]
    reference = sets[-1]
    rows = []
    for tau, S in zip(taus, sets):
        if len(S) == 0:
            rows.append(ConvergenceRow(tau, 0, math.nan, math.nan, flagged=True))
            continue
        best = float(objective_batch(cost, S.A, S.B, S.points).min())
        h = hausdorff(S, reference) if len(reference) else math.nan
        rows.append(ConvergenceRow(tau, len(S), best, h))
    return ConvergenceReport(rows)
