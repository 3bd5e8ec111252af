"""The eight acceptance criteria, each at its stated tolerance and time budget.

Every criterion records one PASS/FAIL line in ``RESULTS``; ``conftest.py``
prints them at the end of the run.  Run this file directly for just the
summary: ``python3 tests/test_acceptance.py``.
"""

import functools
import math
import random
import sys
import time

import numpy as np
import pytest

from oracles import (
    brute_force_sequences,
    random_polyline,
    sample_problem_o,
    sample_separated_sequence,
    sample_start,
    shrink_violations,
)
from turnpath.angle_core import (
    Point,
    angle_add,
    cumulative_bounds,
    in_triangle,
    oriented_angle,
    reduce_2pi,
    turn_angle,
)
from turnpath.cli import Problem, cmd_enumerate, cmd_solve
from turnpath.construct import (
    ProblemOInput,
    construct_polyline,
    equal_turn_step,
    solve_problem_o,
    validate_polyline,
    vertex_region_check,
)
from turnpath.enumeration import (
    GridSpec,
    enumerate_sequences,
    region_diameter,
    separation,
    shrink_constants,
    shrink_map,
)
from turnpath.optimize import CostModel, convergence_study
from turnpath.regions import Closure, TurnRegion, psi, psi_gradient, region_bounding_box, region_contains, to_canonical

RESULTS: dict[str, str] = {}


def record(key: str, ok: bool, elapsed: float, limit: float | None, detail: str) -> None:
    budget = f" (limit {limit:g} s)" if limit is not None else ""
    line = f"criterion {key}: {'PASS' if ok else 'FAIL'} in {elapsed:.2f} s{budget}: {detail}"
    RESULTS[key] = line
    print(line)


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


# ---- 1: angle algebra -------------------------------------------------

def criterion_1():
    rng = np.random.default_rng(1)
    examples = [
        oriented_angle((0, 1), (1, 0)) == math.pi / 2,
        reduce_2pi(3 * math.pi / 2) == pytest.approx(-math.pi / 2, abs=1e-15),
        reduce_2pi(-5 * math.pi) == math.pi,
    ]
    chain_err = 0.0
    for _ in range(100_000):
        k = int(rng.integers(2, 7))
        vs = rng.normal(size=(k, 2))
        total = 0.0
        for u, v in zip(vs, vs[1:]):
            total = angle_add(total, oriented_angle(u, v))
        diff = abs(reduce_2pi(total - oriented_angle(vs[0], vs[-1])))
        chain_err = max(chain_err, diff)
    alg_err = 0.0
    abc = rng.uniform(-math.pi, math.pi, size=(100_000, 3))
    for a, b, c in abc:
        a, b, c = reduce_2pi(a), reduce_2pi(b), reduce_2pi(c)
        if angle_add(a, b) != angle_add(b, a):
            alg_err = math.inf
        alg_err = max(alg_err, abs(reduce_2pi(angle_add(a, angle_add(b, c)) - angle_add(angle_add(a, b), c))))
    ok = all(examples) and chain_err <= 1e-9 and alg_err <= 1e-9
    return ok, f"examples {sum(examples)}/3, chain max err {chain_err:.1e}, assoc max err {alg_err:.1e}"


def test_criterion_1_angle_algebra():
    (ok, detail), dt = timed(criterion_1)
    record("1", ok and dt < 10, dt, 10, detail)
    assert ok and dt < 10


# ---- 2: frame and psi equivalence --------------------------------------

def criterion_2():
    rng = np.random.default_rng(2)
    worst, count = 0.0, 0
    while count < 10_000:
        A, B, C = (tuple(p) for p in rng.uniform(-5, 5, size=(3, 2)))
        if min(math.dist(A, B), math.dist(B, C), math.dist(A, C)) < 0.1:
            continue
        direct = oriented_angle((B[0] - C[0], B[1] - C[1]), (C[0] - A[0], C[1] - A[1]))
        worst = max(worst, abs(direct - psi(to_canonical(A, B, C))))
        count += 1
    grad_worst, count = 0.0, 0
    h = 1e-6
    while count < 1000:
        c = tuple(rng.uniform(-3, 3, size=2))
        if min(math.dist(c, (0, -1)), math.dist(c, (0, 1))) < 0.1:
            continue
        if abs(c[0]) < 1e-5 and abs(c[1]) > 1:
            continue  # psi jumps by 2 pi across the outer rays of the chord line
        g = np.array(psi_gradient(c))
        fd = np.array([(psi((c[0] + h, c[1])) - psi((c[0] - h, c[1]))) / (2 * h),
                       (psi((c[0], c[1] + h)) - psi((c[0], c[1] - h))) / (2 * h)])
        grad_worst = max(grad_worst, float(np.linalg.norm(g - fd) / np.linalg.norm(g)))
        count += 1
    ok = worst <= 1e-9 and grad_worst <= 1e-5
    return ok, f"max |angle - psi| {worst:.1e} over 1e4 triples, max gradient rel err {grad_worst:.1e} over 1e3 points"


def test_criterion_2_frame_equivalence():
    (ok, detail), dt = timed(criterion_2)
    record("2", ok and dt < 10, dt, 10, detail)
    assert ok and dt < 10


# ---- 3: Theorem 1 on random polylines ----------------------------------

def criterion_3():
    rng = np.random.default_rng(3)
    bad_region = bad_distinct = bad_bounds = 0
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        phi = float(rng.uniform(0.01, 0.9 * math.pi / n))
        verts = random_polyline(rng, n, phi, 0.2, 2.0)
        A, B = verts[0], verts[-1]
        alphas = [turn_angle(*verts[i - 1:i + 2]) for i in range(1, n + 1)]
        region = TurnRegion(A, B, n * phi)
        if not all(region_contains(region, c, Closure.CLOSED) for c in verts[1:-1]):
            bad_region += 1
        if len(set(verts)) != len(verts):
            bad_distinct += 1
        for i in range(1, n + 1):
            for j in range(i):
                b = cumulative_bounds(alphas, i, j)
                beta = oriented_angle(np.subtract(verts[i + 1], verts[j]), np.subtract(verts[j + 1], verts[j]))
                beta_bar = oriented_angle(np.subtract(verts[i + 1], verts[j + 1]),
                                          np.subtract(verts[j + 1], verts[j]))
                for x in (beta, beta_bar):
                    if not (-b.sigma - 1e-9 <= b.mu_lo - 1e-9 <= x <= b.mu_hi + 1e-9 <= b.sigma + 2e-9):
                        bad_bounds += 1
    ok = bad_region == bad_distinct == bad_bounds == 0
    return ok, (f"1000 polylines: {bad_region} outside cl S(A,B,n phi), {bad_distinct} with repeated vertices, "
                f"{bad_bounds} cumulative-bound violations")


def test_criterion_3_theorem1():
    (ok, detail), dt = timed(criterion_3)
    record("3", ok and dt < 30, dt, 30, detail)
    assert ok and dt < 30


# ---- 4: Lemma 1 and Problem O ------------------------------------------

@functools.lru_cache(maxsize=None)
def problem_o_samples():
    rng = np.random.default_rng(4)
    return [sample_problem_o(rng) for _ in range(1000)]


def lemma_instance(rng):
    n = int(rng.integers(1, 7))
    phi = float(rng.uniform(0.02, 0.95 * math.pi / n))
    A = tuple(rng.uniform(-2, 2, size=2))
    ang, length = rng.uniform(-math.pi, math.pi), rng.uniform(0.3, 4)
    B = (A[0] + length * math.cos(ang), A[1] + length * math.sin(ang))
    return A, B, n, phi


def criterion_4():
    rng = np.random.default_rng(40)
    case2_bad = case1_bad = 0
    for _ in range(1000):
        A, B, n, phi = lemma_instance(rng)
        B1 = sample_start(rng, A, B, n * phi if n > 1 else phi, closed=n == 1)
        p = construct_polyline(A, B, n, phi, B1)
        rep = validate_polyline(p, phi)
        if not (rep.ok and not rep.zero_turn_indices and vertex_region_check(p, phi)):
            case2_bad += 1
    for _ in range(100):
        A, B, n, phi = lemma_instance(rng)
        u = rng.uniform(0.02, 0.98)
        B1 = (A[0] + u * (B[0] - A[0]), A[1] + u * (B[1] - A[1]))
        p = construct_polyline(A, B, n, phi, B1)
        if not (validate_polyline(p, phi).ok and vertex_region_check(p, phi)):
            case1_bad += 1
    cond_bad = tri_bad = loose_bad = 0
    for A, B, G, t, n in problem_o_samples():
        inp = ProblemOInput(_pt(A), _pt(B), _pt(G), t, n)
        path = [inp.A, inp.C, *solve_problem_o(inp), inp.B]
        turns = [turn_angle(*path[i - 1:i + 2]) for i in range(1, n + 1)]
        lengths = [math.dist(p, q) for p, q in zip(path[1:n], path[2:n + 1])]
        Bn = path[n]
        cross = (B[0] - G[0]) * (Bn[1] - G[1]) - (B[1] - G[1]) * (Bn[0] - G[0])
        on_segment = abs(cross) <= 1e-9 * math.dist(B, G) and math.dist(Bn, G) <= math.dist(B, G)
        ok = (max(abs(a - inp.psi / n) for a in turns) <= 1e-9
              and max(lengths) - min(lengths) <= 1e-9 * max(lengths)
              and on_segment and abs(math.dist(Bn, G) - math.dist(inp.C, G)) <= 1e-9 * math.dist(A, G))
        cond_bad += not ok
        tri_bad += not all(in_triangle(A, B, G, q, eps=1e-9) for q in path[1:-1])
        lam = equal_turn_step(inp.psi, t, n)
        loose_bad += lam > 2 * (1 - t) / (n - 1) + 1e-12
    ok = case2_bad == case1_bad == cond_bad == tri_bad == loose_bad == 0
    return ok, (f"Case 2 failures {case2_bad}/1000, Case 1 failures {case1_bad}/100, "
                f"Problem O condition failures {cond_bad}/1000, outside triangle {tri_bad}/1000, "
                f"step above 2(1-t)/(n-1): {loose_bad}/1000")


def _pt(p):
    return Point(float(p[0]), float(p[1]))


def test_criterion_4_lemma1_and_problem_o():
    (ok, detail), dt = timed(criterion_4)
    record("4", ok and dt < 60, dt, 60, detail)
    assert ok and dt < 60


@pytest.mark.xfail(strict=True, reason="the step bound 2(1-t)/n is false for small total turns; "
                                       "2(1-t)/(n-1) is the sharp bound and is checked above")
def test_criterion_4_stated_step_bound():
    start = time.perf_counter()
    over = [(t, n, equal_turn_step(ProblemOInput(_pt(A), _pt(B), _pt(G), t, n).psi, t, n))
            for A, B, G, t, n in problem_o_samples()]
    over = [(t, n, lam) for t, n, lam in over if lam > 2 * (1 - t) / n + 1e-12]
    worked = equal_turn_step(math.pi / 3, 0.5, 3)
    record("4 (step bound 2(1-t)/n as stated)", not over, time.perf_counter() - start, None,
           f"{len(over)}/1000 samples exceed it; at psi=pi/3, t=0.5, n=3 the step is {worked:.4f} > 1/3")
    assert not over


# ---- 5: enumeration equals brute force ---------------------------------

def criterion_5():
    rng = np.random.default_rng(5)
    mismatches, sizes = 0, []
    for n in (1, 2, 3):
        for _ in range(8):
            phi = float(rng.uniform(0.15, 0.9 * math.pi / n))
            A = tuple(rng.uniform(-1, 1, size=2))
            ang, length = rng.uniform(-math.pi, math.pi), rng.uniform(0.5, 2.5)
            B = (A[0] + length * math.cos(ang), A[1] + length * math.sin(ang))
            lo, hi = region_bounding_box(TurnRegion(A, B, n * phi))
            m = 25 if n < 3 else 15
            tau = max(hi[0] - lo[0], hi[1] - lo[1]) / (m - 1)
            grid = GridSpec(lo, (lo[0] + (m - 1) * tau, lo[1] + (m - 1) * tau), tau)
            got = enumerate_sequences(A, B, n, phi, grid).as_set()
            want = brute_force_sequences(grid.array(), A, B, n, phi)
            mismatches += got != want
            sizes.append(len(want))
    ok = mismatches == 0
    return ok, f"24 instances (n=1,2,3), {mismatches} mismatches, set sizes {min(sizes)}..{max(sizes)}"


def test_criterion_5_oracle_equality():
    (ok, detail), dt = timed(criterion_5)
    record("5", ok and dt < 120, dt, 120, detail)
    assert ok and dt < 120


# ---- 6: shrink map ------------------------------------------------------

def criterion_6():
    rng = random.Random(6)
    worst = [-math.inf] * 3
    for _ in range(100):
        n = rng.randint(1, 6)
        phi = rng.uniform(0.05, min(math.pi / 2 - 1e-3, 0.9 * math.pi / n))
        W, A, B = sample_separated_sequence(rng, n, phi, 0.2, 2.0)
        s = separation(W, A, B)
        prm = shrink_constants(s, max(region_diameter(A, B, n * phi), 2 * s), phi, n)
        for div in (1, 2, 4):
            t = s / (div * prm.theta)
            Wt = shrink_map(W, A, B, t, prm, phi, n)
            v = shrink_violations(W, A, B, Wt, t, s, phi, prm.kappa, prm.omega)
            worst = [max(a, b) for a, b in zip(worst, v)]
    ok = worst[0] <= 1e-9 and worst[1] <= 1e-9 and worst[2] <= 1e-12
    return ok, (f"300 shrinks; worst excess: separation {worst[0]:.1e}, turn {worst[1]:.1e}, "
                f"displacement {worst[2]:.1e}")


def test_criterion_6_shrink_map():
    (ok, detail), dt = timed(criterion_6)
    record("6", ok and dt < 30, dt, 30, detail)
    assert ok and dt < 30


# ---- 7: convergence -----------------------------------------------------

def criterion_7():
    rep = convergence_study((0.0, -1.0), (0.0, 1.0), 2, math.pi / 4, CostModel(), [0.2, 0.1, 0.05, 0.025])
    objs = [r.min_objective for r in rep.rows]
    hs = [r.hausdorff_to_reference for r in rep.rows]
    ok = (all(b <= a for a, b in zip(objs, objs[1:])) and objs[-1] <= 1.05 * 2.0
          and all(b <= a for a, b in zip(hs, hs[1:])) and not any(r.flagged for r in rep.rows))
    sizes = "/".join(str(r.set_size) for r in rep.rows)
    return ok, (f"set sizes {sizes}, min objective {' >= '.join(f'{x:.6f}' for x in objs)}, "
                f"h {' >= '.join(f'{x:.4g}' for x in hs)}")


def test_criterion_7_convergence():
    (ok, detail), dt = timed(criterion_7)
    record("7", ok and dt < 120, dt, 120, detail)
    assert ok and dt < 120


# ---- 8: determinism -----------------------------------------------------

def criterion_8(tmp):
    prob = Problem((0.0, -1.0), (0.0, 1.0), 3, 0.45)
    lo, hi = region_bounding_box(TurnRegion(prob.A, prob.B, prob.n * prob.phi))
    prob.grid = GridSpec((lo[0] - 0.1, lo[1] - 0.1), (hi[0] + 0.1, hi[1] + 0.1), 0.1)
    prob.cost = CostModel(1.0, 0.25)
    blobs = {}
    for cmd, fmt in (("enumerate", "json"), ("enumerate", "csv"), ("solve", "json")):
        outs = []
        for k, workers in enumerate((1, 2, 4, 1)):
            path = tmp / f"{cmd}-{fmt}-{k}.{fmt}"
            if cmd == "enumerate":
                cmd_enumerate(prob, str(path), fmt, workers)
            else:
                cmd_solve(prob, str(path), workers)
            outs.append(path.read_bytes())
        blobs[(cmd, fmt)] = outs
    ok = all(len(set(v)) == 1 for v in blobs.values())
    size = blobs[("enumerate", "json")][0].count(b"]]")
    return ok, f"enumerate json/csv and solve identical over workers 1, 2, 4 and a repeat ({size} sequences)"


def test_criterion_8_determinism(tmp_path):
    (ok, detail), dt = timed(lambda: criterion_8(tmp_path))
    record("8", ok, dt, None, detail)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
