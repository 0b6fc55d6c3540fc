#!/usr/bin/env python3
"""Draw the optimal polygons with their diameter graphs (SVG).

Solves n = 8..16 (even) symmetric and writes one figure each into
scripts/out/.
"""

import pathlib
import sys

from maxpoly import build_program, solve, SolverConfig
from maxpoly import formulation as fm
from maxpoly import geometry as geo

OUT = pathlib.Path(__file__).resolve().parent / "out"


def main() -> int:
    OUT.mkdir(exist_ok=True)
    for n in (8, 10, 12, 14, 16):
        result = solve(build_program(n, symmetric=True), SolverConfig(starts=48))
        full = fm.expand_assignment(n, result.best)
        poly = fm.assignment_to_polygon(n, full)
        graph = geo.diameter_graph(poly)
        path = OUT / f"optimal_{n}gon.svg"
        path.write_text(geo.render_svg(poly, graph))
        print(f"n={n}: area {result.objective:.8f} -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
