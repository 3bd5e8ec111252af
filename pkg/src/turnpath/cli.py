"""Command-line front end: ``turnpath <region|construct|enumerate|solve|converge>``.

Exit codes: 0 success, 1 validation, 2 I/O, 3 resource cap, 4 no solution.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .angle_core import EPS_ANGLE, GeometryError, Point, as_point
from .construct import construct_polyline, validate_polyline
from .enumeration import GridSpec, ResourceCapError, enumerate_sequences, enumeration_work
from .optimize import CostModel, convergence_study, solve_discrete, sweep_box
from .regions import Closure, Side, TurnRegion, region_boundary, region_bounding_box, region_contains

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_CAP, EXIT_NO_SOLUTION = 0, 1, 2, 3, 4
DEFAULT_MAX_WORK = 2e9


class ProblemError(ValueError):
    pass


class UsageError(ValueError):
    pass


@dataclass
class Problem:
    A: Point
    B: Point
    n: int
    phi: float
    grid: GridSpec | None = None
    grid_tau: float | None = None
    cost: CostModel = field(default_factory=CostModel)
    tolerance: float = EPS_ANGLE
    strict_turns: bool = False
    seed: int = 0
    warnings: list[str] = field(default_factory=list)


@dataclass
class RunResult:
    command: str
    outputs: list[str]
    warnings: list[str]
    timing: float
    exit_code: int = EXIT_OK


def _pair(value, name: str) -> Point:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise ProblemError(f"{name} must be a two-element array")
    try:
        return as_point(value)
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"{name}: {exc}") from exc


def parse_problem(data: dict, degrees: bool = False) -> Problem:
    """Validate a decoded problem file."""
    try:
        A, B = _pair(data["A"], "A"), _pair(data["B"], "B")
        n, phi = data["n"], float(data["phi"])
    except KeyError as exc:
        raise ProblemError(f"missing field {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemError(f"n must be an integer >= 1, got {n!r}")
    if degrees:
        phi = math.radians(phi)
    if A == B:
        raise ProblemError("A and B must differ")
    if not phi > 0.0:
        raise ProblemError(f"phi must be positive, got {phi}")
    if not n * phi < math.pi:
        raise ProblemError(f"n * phi = {n * phi:.6g} must be below pi; larger total turns are not supported")
    prob = Problem(A, B, n, phi)
    cost = data.get("cost", {})
    prob.cost = CostModel(float(cost.get("length_weight", 1.0)), float(cost.get("turn_weight", 0.0)))
    if prob.cost.length_weight < 0 or prob.cost.turn_weight < 0:
        raise ProblemError("cost weights must be nonnegative")
    prob.tolerance = float(data.get("tolerance", EPS_ANGLE))
    prob.strict_turns = bool(data.get("strict_turns", False))
    prob.seed = int(data.get("seed", 0))
    if "grid" in data:
        prob.grid_tau, prob.grid = _parse_grid(data["grid"], prob)
    return prob


def _parse_grid(g: dict, prob: Problem) -> tuple[float, GridSpec]:
    tau = g.get("tau")
    if isinstance(tau, (list, tuple)):
        if len(set(map(float, tau))) != 1:
            raise ProblemError("anisotropic grids are not supported; use one tau")
        tau = tau[0]
    if tau is None:
        raise ProblemError("grid.tau is required")
    tau = float(tau)
    if not tau > 0.0:
        raise ProblemError(f"grid.tau must be positive, got {tau}")
    if "q" in g or "p" in g:
        q, p = _pair(g.get("q"), "grid.q"), _pair(g.get("p"), "grid.p")
        lo, hi = region_bounding_box(TurnRegion(prob.A, prob.B, prob.n * prob.phi))
        if lo.c1 < q.c1 or lo.c2 < q.c2 or hi.c1 > p.c1 or hi.c2 > p.c2:
            prob.warnings.append("grid box does not contain S(A, B, n*phi); the discrete set covers only its part inside the box")
    else:
        q, p = sweep_box(prob.A, prob.B, prob.n, prob.phi, tau)
    try:
        return tau, GridSpec(q, p, tau)
    except GeometryError as exc:
        raise ProblemError(str(exc)) from exc


def load_problem(path: str, degrees: bool = False) -> Problem:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProblemError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProblemError("problem file must hold a JSON object")
    return parse_problem(data, degrees)


# ---- SVG ---------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _xy(p: Sequence[float]) -> str:
    return f"{_fmt(p[0])},{_fmt(-p[1])}"


def _arc_path(region: TurnRegion, side: Side) -> str:
    """SVG elliptical arc from A to B along one boundary part (y flipped)."""
    A, B = region.A, region.B
    radius = math.dist(A, B) / (2.0 * math.sin(region.phi))
    mid = region_boundary(region, side, 3)[1]
    sA, sB, sM = (np.array([p[0], -p[1]]) for p in (A, B, mid))
    # the circle through A, B and the arc midpoint
    ax, ay = sA
    bx, by = sB
    mx, my = sM
    d = 2.0 * (ax * (by - my) + bx * (my - ay) + mx * (ay - by))
    cx = ((ax**2 + ay**2) * (by - my) + (bx**2 + by**2) * (my - ay) + (mx**2 + my**2) * (ay - by)) / d
    cy = ((ax**2 + ay**2) * (mx - bx) + (bx**2 + by**2) * (ax - mx) + (mx**2 + my**2) * (bx - ax)) / d
    ang = [math.atan2(py - cy, px - cx) for px, py in (sA, sM, sB)]
    sweep = 1 if (ang[1] - ang[0]) % (2 * math.pi) < (ang[2] - ang[0]) % (2 * math.pi) else 0
    large = 1 if region.phi > math.pi / 2 else 0
    return (f'<path class="arc" d="M {_xy(A)} A {_fmt(radius)} {_fmt(radius)} 0 {large} {sweep} {_xy(B)}" '
            f'fill="none" stroke="#1f77b4" stroke-width="{{w}}"/>')


def render_svg(region: TurnRegion, polyline: Sequence[Point] | None = None, chord: bool = True) -> str:
    lo, hi = region_bounding_box(region)
    xs = [lo.c1, hi.c1] + ([p[0] for p in polyline] if polyline else [])
    ys = [lo.c2, hi.c2] + ([p[1] for p in polyline] if polyline else [])
    span = max(max(xs) - min(xs), max(ys) - min(ys))
    margin = 0.05 * span
    x0, y0 = min(xs) - margin, -max(ys) - margin
    w, h = max(xs) - min(xs) + 2 * margin, max(ys) - min(ys) + 2 * margin
    stroke = _fmt(span / 250.0)
    body = [_arc_path(region, Side.RIGHT).format(w=stroke), _arc_path(region, Side.LEFT).format(w=stroke)]
    if chord:
        body.append(f'<line class="chord" x1="{_fmt(region.A[0])}" y1="{_fmt(-region.A[1])}" '
                    f'x2="{_fmt(region.B[0])}" y2="{_fmt(-region.B[1])}" stroke="#999999" '
                    f'stroke-width="{stroke}" stroke-dasharray="{_fmt(3 * float(stroke))}"/>')
    if polyline:
        pts = " ".join(_xy(p) for p in polyline)
        body.append(f'<polyline class="path" points="{pts}" fill="none" stroke="#d62728" stroke-width="{stroke}"/>')
    for label, p in (("A", region.A), ("B", region.B)):
        body.append(f'<circle class="marker" id="{label}" cx="{_fmt(p[0])}" cy="{_fmt(-p[1])}" '
                    f'r="{_fmt(span / 80.0)}" fill="#000000"/>')
    header = ('<?xml version="1.0" encoding="UTF-8"?>\n'
              '<!-- turnpath: y axis flipped so that +y points up; turn angles are positive '
              'for left (counterclockwise) turns -->\n'
              f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
              f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">\n')
    return header + "\n".join("  " + line for line in body) + "\n</svg>\n"


# ---- commands ----------------------------------------------------------

def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _require_grid(prob: Problem) -> GridSpec:
    if prob.grid is None:
        raise ProblemError("this command needs a grid (at least grid.tau) in the problem file")
    return prob.grid


def cmd_region(prob: Problem, out: str, fmt: str = "svg") -> RunResult:
    region = TurnRegion(prob.A, prob.B, prob.n * prob.phi)
    if fmt == "svg":
        _write(out, render_svg(region))
    elif fmt == "json":
        doc = {"A": list(prob.A), "B": list(prob.B), "phi": region.phi,
               "right": [list(p) for p in region_boundary(region, Side.RIGHT, 65)],
               "left": [list(p) for p in region_boundary(region, Side.LEFT, 65)]}
        _write(out, _dump_json(doc))
    else:
        raise UsageError(f"region supports svg or json, not {fmt}")
    return RunResult("region", [out], prob.warnings, 0.0)


def _sample_start(prob: Problem) -> Point:
    """A seeded uniform draw from S(A, B, n phi)."""
    rng = random.Random(prob.seed)
    region = TurnRegion(prob.A, prob.B, prob.n * prob.phi)
    lo, hi = region_bounding_box(region)
    while True:
        c = Point(rng.uniform(lo.c1, hi.c1), rng.uniform(lo.c2, hi.c2))
        if region_contains(region, c, Closure.OPEN):
            return c


def cmd_construct(prob: Problem, b1: Point | None, out: str, svg: str | None = None) -> RunResult:
    start = b1 if b1 is not None else _sample_start(prob)
    poly = construct_polyline(prob.A, prob.B, prob.n, prob.phi, start, prob.tolerance)
    report = validate_polyline(poly, prob.phi, prob.tolerance)
    _write(out, _dump_json({"polyline": poly.to_json(), "report": asdict(report)}))
    outputs = [out]
    if svg:
        _write(svg, render_svg(TurnRegion(prob.A, prob.B, prob.n * prob.phi), poly.vertices, chord=False))
        outputs.append(svg)
    return RunResult("construct", outputs, prob.warnings, 0.0)


def _sequences_csv(points: np.ndarray, n: int) -> str:
    header = ",".join(f"b{i}_c{j}" for i in range(1, n + 1) for j in (1, 2))
    rows = [",".join(repr(float(x)) for x in seq.ravel()) for seq in points]
    return "\n".join([header, *rows]) + "\n"


def cmd_enumerate(prob: Problem, out: str, fmt: str = "json", workers: int = 1,
                  max_work: float = DEFAULT_MAX_WORK) -> RunResult:
    grid = _require_grid(prob)
    S = enumerate_sequences(prob.A, prob.B, prob.n, prob.phi, grid, prob.tolerance,
                            prob.strict_turns, workers, max_work)
    if fmt == "json":
        _write(out, json.dumps(S.points.tolist()) + "\n")
    elif fmt == "csv":
        _write(out, _sequences_csv(S.points, prob.n))
    else:
        raise UsageError(f"enumerate supports json or csv, not {fmt}")
    return RunResult("enumerate", [out], prob.warnings, 0.0)


def cmd_solve(prob: Problem, out: str, workers: int = 1, svg: str | None = None,
              max_work: float = DEFAULT_MAX_WORK) -> RunResult:
    grid = _require_grid(prob)
    work = enumeration_work(prob.A, prob.B, prob.n, prob.phi, grid)
    if work > max_work:
        raise ResourceCapError(f"estimated work {work:.3g} exceeds cap {max_work:.3g}")
    sol = solve_discrete(prob.A, prob.B, prob.n, prob.phi, grid, prob.cost, prob.tolerance,
                         prob.strict_turns, workers)
    _write(out, _dump_json(sol.to_json()))
    outputs = [out]
    if svg and sol.found:
        verts = [prob.A, *sol.sequence, prob.B]
        _write(svg, render_svg(TurnRegion(prob.A, prob.B, prob.n * prob.phi), verts, chord=False))
        outputs.append(svg)
    code = EXIT_OK if sol.found else EXIT_NO_SOLUTION
    return RunResult("solve", outputs, prob.warnings, 0.0, code)


def cmd_converge(prob: Problem, tau0: float, levels: int, out: str, workers: int = 1) -> RunResult:
    if levels < 2:
        raise UsageError("--levels must be at least 2")
    if not tau0 > 0:
        raise UsageError("--tau0 must be positive")
    taus = [tau0 / 2.0 ** k for k in range(levels)]
    box = (prob.grid.q, prob.grid.p) if prob.grid is not None else None
    report = convergence_study(prob.A, prob.B, prob.n, prob.phi, prob.cost, taus, box,
                               prob.tolerance, workers)
    _write(out, report.to_csv())
    code = EXIT_VALIDATION if all(r.flagged for r in report.rows) else EXIT_OK
    return RunResult("converge", [out], prob.warnings, 0.0, code)


# ---- entry point -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _point_arg(text: str) -> Point:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {text!r}") from exc
    return Point(x, y)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="turnpath", description="Plan planar paths with at most n turns of at most phi each.")
    parser.add_argument("command", choices=["region", "construct", "enumerate", "solve", "converge"])
    parser.add_argument("--input", required=True, help="problem file (JSON)")
    parser.add_argument("--out", required=True, help="output path")
    parser.add_argument("--format", choices=["svg", "json", "csv"], default=None)
    parser.add_argument("--b1", type=_point_arg, default=None, help="first turn point X,Y for construct")
    parser.add_argument("--tau0", type=float, default=None, help="coarsest grid step for converge")
    parser.add_argument("--levels", type=int, default=None, help="number of sweep levels for converge")
    parser.add_argument("--seed", type=int, default=None, help="overrides the problem seed")
    parser.add_argument("--degrees", action="store_true", help="phi in the problem file is in degrees")
    parser.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    parser.add_argument("--svg", default=None, help="extra SVG rendering for construct and solve")
    parser.add_argument("--max-work", type=float, default=DEFAULT_MAX_WORK,
                        help="abort enumerate/solve when the work estimate exceeds this")
    return parser


def run(args: argparse.Namespace) -> RunResult:
    prob = load_problem(args.input, args.degrees)
    if args.seed is not None:
        prob.seed = args.seed
    if args.command == "region":
        return cmd_region(prob, args.out, args.format or "svg")
    if args.command == "construct":
        return cmd_construct(prob, args.b1, args.out, args.svg)
    if args.command == "enumerate":
        return cmd_enumerate(prob, args.out, args.format or "json", args.workers, args.max_work)
    if args.command == "solve":
        return cmd_solve(prob, args.out, args.workers, args.svg, args.max_work)
    if args.tau0 is None or args.levels is None:
        raise UsageError("converge needs --tau0 and --levels")
    return cmd_converge(prob, args.tau0, args.levels, args.out, args.workers)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        result = run(args)
    except (ProblemError, UsageError, GeometryError) as exc:
        print(f"turnpath: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"turnpath: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ResourceCapError as exc:
        print(f"turnpath: {exc}; try a larger tau", file=sys.stderr)
        return EXIT_CAP
    result.timing = time.perf_counter() - start
    for w in result.warnings:
        print(f"turnpath: warning: {w}", file=sys.stderr)
    if result.exit_code == EXIT_NO_SOLUTION:
        print("turnpath: no admissible sequence on this grid", file=sys.stderr)
    print(json.dumps({"command": result.command, "outputs": result.outputs,
                      "warnings": result.warnings, "timing": round(result.timing, 3)}))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
