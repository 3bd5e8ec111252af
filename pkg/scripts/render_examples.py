"""Render a few regions and constructed paths to SVG files in an output directory."""

import argparse
import math
from pathlib import Path

from turnpath.cli import render_svg
from turnpath.construct import construct_polyline, validate_polyline
from turnpath.regions import TurnRegion

# (A, B, n, phi, B1)
CASES = [
    ((0.0, -1.0), (0.0, 1.0), 1, math.pi / 2, (0.6, 0.2)),
    ((0.0, -1.0), (0.0, 1.0), 3, math.pi / 6, (0.4, 0.2)),
    ((0.0, 0.0), (3.0, 1.0), 2, 0.6, (1.5, 0.5)),
    ((-1.0, 0.0), (2.0, 0.0), 4, 0.5, (0.2, -0.9)),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures")
    out = Path(ap.parse_args().out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k, (A, B, n, phi, B1) in enumerate(CASES):
        poly = construct_polyline(A, B, n, phi, B1)
        rep = validate_polyline(poly, phi)
        path = out / f"case{k}.svg"
        path.write_text(render_svg(TurnRegion(A, B, n * phi), poly.vertices, chord=True), encoding="utf-8")
        turns = ", ".join(f"{a:+.4f}" for a in rep.turn_angles)
        print(f"{path}: n={n} phi={phi:.4f} ok={rep.ok} turns=[{turns}]")


if __name__ == "__main__":
    main()
