#!/usr/bin/env python3
"""Run the full reproduction table and save artifacts next to this script.

Writes one result JSON, one certificate JSON, and one SVG per instance
into scripts/out/, then prints the pass/fail table.  Equivalent to
`maxpoly reproduce` plus the per-instance artifacts.
"""

import json
import pathlib
import sys
import time

from maxpoly import build_program, certify, solve, SolverConfig
from maxpoly import formulation as fm
from maxpoly import geometry as geo
from maxpoly import interval_cert as ic
from maxpoly import local_solver as ls
from maxpoly.reference import REPRODUCE_ROWS

OUT = pathlib.Path(__file__).resolve().parent / "out"


def main() -> int:
    OUT.mkdir(exist_ok=True)
    failures = 0
    for row in REPRODUCE_ROWS:
        tag = f"n{row.n}_{'sym' if row.symmetric else 'full'}"
        program = build_program(row.n, symmetric=row.symmetric)
        t0 = time.time()
        result = solve(program, SolverConfig(starts=64))
        dt = time.time() - t0
        err = abs(result.objective - row.reference)
        ok = err <= row.tolerance
        failures += 0 if ok else 1

        (OUT / f"{tag}.json").write_text(ls.result_to_json(program, result))
        full = (
            fm.expand_assignment(row.n, result.best)
            if row.symmetric
            else result.best
        )
        cert = certify(row.n, full)
        (OUT / f"{tag}.cert.json").write_text(ic.certificate_to_json(cert))
        poly = fm.assignment_to_polygon(row.n, full)
        graph = geo.diameter_graph(poly)
        (OUT / f"{tag}.svg").write_text(geo.render_svg(poly, graph))

        print(
            f"{tag:<12} area={result.objective:.8f} ref={row.reference:.8f} "
            f"|err|={err:.1e} cert>={cert.certified_lower_bound:.8f} "
            f"{dt:5.1f}s {'pass' if ok else 'FAIL'}"
        )
    print(f"artifacts in {OUT}")
    return 3 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
