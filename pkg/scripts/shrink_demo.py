"""Apply the shrink map to random admissible sequences and report the worst margins."""

import argparse
import math
import random

from turnpath.angle_core import turn_angle
from turnpath.enumeration import (
    region_diameter,
    separation,
    sequence_is_admissible,
    shrink_constants,
    shrink_map,
)


def random_sequence(rng: random.Random, n: int, phi: float, lo: float, hi: float):
    while True:
        h = rng.uniform(0, 2 * math.pi)
        x = y = 0.0
        verts = [(x, y)]
        for i in range(n + 1):
            length = rng.uniform(lo, hi)
            x, y = x + length * math.cos(h), y + length * math.sin(h)
            verts.append((x, y))
            if i < n:
                h += rng.choice([phi, -phi]) if rng.random() < 0.6 else rng.uniform(-phi, phi)
        W, A, B = verts[1:-1], verts[0], verts[-1]
        if A != B and sequence_is_admissible(W, A, B, phi, tol=1e-12):
            return W, A, B


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lo", type=float, default=0.2)
    ap.add_argument("--hi", type=float, default=2.0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    worst_sep = worst_turn = worst_disp = -math.inf
    for _ in range(args.trials):
        n = rng.randint(1, 6)
        phi = rng.uniform(0.05, min(math.pi / 2 - 1e-3, 0.9 * math.pi / n))
        W, A, B = random_sequence(rng, n, phi, args.lo, args.hi)
        s = separation(W, A, B)
        p = shrink_constants(s, max(region_diameter(A, B, n * phi), 2 * s), phi, n)
        for div in (1, 2, 4):
            t = s / (div * p.theta)
            Wt = shrink_map(W, A, B, t, p, phi, n)
            verts = [A, *Wt, B]
            turn = max(abs(turn_angle(*verts[i - 1:i + 2])) for i in range(1, n + 1))
            disp = max(max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a, b in zip(W, Wt))
            worst_sep = max(worst_sep, (s - t * p.kappa) - separation(Wt, A, B))
            worst_turn = max(worst_turn, turn - (phi - p.omega * t))
            worst_disp = max(worst_disp, disp - t * p.kappa / 2)
    print(f"{3 * args.trials} shrinks, worst excess over the guarantees (<= 0 means met):")
    print(f"  separation   {worst_sep:.3e}")
    print(f"  turn bound   {worst_turn:.3e}")
    print(f"  displacement {worst_disp:.3e}")


if __name__ == "__main__":
    main()
