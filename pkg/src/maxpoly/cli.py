"""Command-line surface: build, solve, certify, relax, render, reproduce.

Exit codes: 0 success, 2 usage error, 3 infeasible/uncertified/failed
reproduction, 4 I/O error.  `--json` swaps the human summary for a
machine document on stdout; file artifacts are unchanged.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import formulation as fm
from . import geometry as geo
from . import interval_cert as ic
from . import local_solver as ls
from . import moment_relaxation as mr
from . import reference

MAX_N_DEFAULT = 24


@dataclass
class CommandOutcome:
    exit_code: int
    summary: str
    artifacts: list[str] = field(default_factory=list)
    payload: dict | None = None


def _check_n(n: int, allow_large: bool) -> str | None:
    if n % 2 != 0 or n < 4:
        return f"n must be even and >= 4 (got {n}); odd cases are closed-form regular polygons"
    if n > MAX_N_DEFAULT:
        if not allow_large:
            return (
                f"n={n} exceeds the default cap {MAX_N_DEFAULT} "
                "(relaxation sizes explode); pass --allow-large to force"
            )
        print(
            f"warning: n={n} is past the tested range; expect long runtimes",
            file=sys.stderr,
        )
    return None


def _config_from_args(args) -> ls.SolverConfig:
    return ls.SolverConfig(starts=args.starts, rng_seed=args.seed)


def cmd_solve(args) -> CommandOutcome:
    msg = _check_n(args.n, args.allow_large)
    if msg:
        return CommandOutcome(2, f"usage error: {msg}")
    program = fm.build_program(args.n, symmetric=args.symmetric)
    cfg = _config_from_args(args)
    t0 = time.time()
    try:
        result = ls.solve(program, cfg)
    except ls.InfeasibleError as e:
        return CommandOutcome(3, f"infeasible: {e}")
    elapsed = time.time() - t0
    artifacts = []
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(ls.result_to_json(program, result))
        except OSError as e:
            return CommandOutcome(4, f"cannot write {args.out}: {e}")
        artifacts.append(args.out)
    lines = [
        f"n={args.n} {'symmetric' if args.symmetric else 'full'} "
        f"({cfg.starts} starts, seed {cfg.rng_seed}, {elapsed:.1f}s)",
        f"  area            {result.objective:.8f}",
        f"  max violation   {result.max_violation:.3e}",
        f"  KKT residual    {result.kkt_residual:.3e}",
        f"  winning start   {result.winning_start}",
        "  x               " + " ".join(f"{v:.8f}" for v in result.best.x),
    ]
    payload = json.loads(ls.result_to_json(program, result))
    return CommandOutcome(0, "\n".join(lines), artifacts, payload)


def cmd_certify(args) -> CommandOutcome:
    try:
        with open(args.result) as fh:
            doc = ls.result_from_json(fh.read())
    except OSError as e:
        return CommandOutcome(4, f"cannot read {args.result}: {e}")
    except (ValueError, json.JSONDecodeError) as e:
        return CommandOutcome(2, f"bad result file: {e}")
    n = int(doc["n"])
    a = fm.Assignment(tuple(doc["x"]))
    if doc.get("symmetric"):
        a = fm.expand_assignment(n, a)
    cert = ic.certify(n, a)
    payload = json.loads(ic.certificate_to_json(cert))
    artifacts = []
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(ic.certificate_to_json(cert))
        except OSError as e:
            return CommandOutcome(4, f"cannot write {args.out}: {e}")
        artifacts.append(args.out)
    if not cert.convex_verified or cert.certified_lower_bound is None:
        return CommandOutcome(
            3,
            "certification failed: convexity could not be verified "
            f"(area in [{cert.area.lo:.9f}, {cert.area.hi:.9f}])",
            artifacts,
            payload,
        )
    upper = geo.upper_bound_area(n)
    lines = [
        f"n={n}: certified lower bound {cert.certified_lower_bound:.9f}",
        f"  area enclosure  [{cert.area.lo:.12f}, {cert.area.hi:.12f}]",
        f"  diameter^2      [{cert.diameter_sq.lo:.12f}, {cert.diameter_sq.hi:.12f}]",
        f"  analytic bracket {cert.certified_lower_bound:.8f} <= A*_{n} <= {upper:.8f}",
    ]
    return CommandOutcome(0, "\n".join(lines), artifacts, payload)


def cmd_relax(args) -> CommandOutcome:
    msg = _check_n(args.n, args.allow_large)
    if msg:
        return CommandOutcome(2, f"usage error: {msg}")
    if args.order not in (1, 2, 3):
        return CommandOutcome(2, f"usage error: order must be 1, 2 or 3 (got {args.order})")
    program = fm.build_program(
        args.n, symmetric=args.symmetric, relax_closing_edge=args.relaxed_closing
    )
    instance = mr.build_relaxation(program, args.order)
    st = mr.stats(instance)
    artifacts = []
    sdpa_path = args.sdpa
    if sdpa_path is None and not args.stats:
        tag = "sym" if args.symmetric else "full"
        sdpa_path = f"maxpoly_n{args.n}_{tag}_d{args.order}.dat-s"
    if sdpa_path:
        sidecar_path = sdpa_path + ".json"
        try:
            with open(sdpa_path, "w") as fh:
                fh.write(mr.export_sdpa(instance))
            with open(sidecar_path, "w") as fh:
                fh.write(mr.sidecar_json(instance))
        except OSError as e:
            return CommandOutcome(4, f"cannot write {sdpa_path}: {e}")
        artifacts += [sdpa_path, sidecar_path]
    lines = [
        f"n={args.n} {'symmetric' if args.symmetric else 'full'} order {args.order}:",
        f"  moment vars: {st.num_moment_vars}, moment matrix: {st.moment_matrix_size}",
        f"  localizing blocks: {st.localizing_count} "
        f"(sizes {sorted(set(sz for _, sz in st.localizing_sizes))})",
    ]
    if st.equality_sizes:
        lines.append(f"  equality blocks: {[sz for _, sz in st.equality_sizes]}")
    if artifacts:
        lines.append("  wrote " + " and ".join(artifacts))
    payload = {
        "n": args.n,
        "symmetric": args.symmetric,
        "order": args.order,
        "num_moment_vars": st.num_moment_vars,
        "moment_matrix_size": st.moment_matrix_size,
        "localizing_count": st.localizing_count,
    }
    return CommandOutcome(0, "\n".join(lines), artifacts, payload)


def cmd_build(args) -> CommandOutcome:
    msg = _check_n(args.n, args.allow_large)
    if msg:
        return CommandOutcome(2, f"usage error: {msg}")
    program = fm.build_program(
        args.n, symmetric=args.symmetric, relax_closing_edge=args.relaxed_closing
    )
    text = fm.to_json(program)
    artifacts = []
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as e:
            return CommandOutcome(4, f"cannot write {args.out}: {e}")
        artifacts.append(args.out)
        summary = f"wrote program for n={args.n} to {args.out}"
    else:
        summary = text
    return CommandOutcome(0, summary, artifacts, json.loads(text))


def cmd_render(args) -> CommandOutcome:
    try:
        with open(args.result) as fh:
            doc = ls.result_from_json(fh.read())
    except OSError as e:
        return CommandOutcome(4, f"cannot read {args.result}: {e}")
    except (ValueError, json.JSONDecodeError) as e:
        return CommandOutcome(2, f"bad result file: {e}")
    n = int(doc["n"])
    a = fm.Assignment(tuple(doc["x"]))
    if doc.get("symmetric"):
        a = fm.expand_assignment(n, a)
    poly = fm.assignment_to_polygon(n, a)
    graph = None
    if not args.no_graph:
        graph = geo.diameter_graph(poly, tol=args.tol)
    svg = geo.render_svg(poly, graph)
    out = args.out or f"maxpoly_n{n}.svg"
    try:
        with open(out, "w") as fh:
            fh.write(svg)
    except OSError as e:
        return CommandOutcome(4, f"cannot write {out}: {e}")
    return CommandOutcome(0, f"wrote {out}", [out])


def cmd_reproduce(args) -> CommandOutcome:
    rows = []
    failures = 0
    for row in reference.REPRODUCE_ROWS:
        program = fm.build_program(row.n, symmetric=row.symmetric)
        cfg = ls.SolverConfig(starts=args.starts, rng_seed=args.seed)
        t0 = time.time()
        try:
            result = ls.solve(program, cfg)
            obtained = result.objective
            err = abs(obtained - row.reference)
            ok = err <= row.tolerance
        except ls.InfeasibleError:
            obtained = float("nan")
            err = float("nan")
            ok = False
        if not ok:
            failures += 1
        rows.append(
            {
                "n": row.n,
                "variant": "symmetric" if row.symmetric else "full",
                "obtained": obtained,
                "reference": row.reference,
                "abs_error": err,
                "tolerance": row.tolerance,
                "seconds": round(time.time() - t0, 2),
                "status": "pass" if ok else "FAIL",
            }
        )
    header = (
        f"{'n':>3} {'variant':<10} {'obtained':>12} {'reference':>12} "
        f"{'|err|':>9} {'tol':>8} {'time':>7} status"
    )
    lines = [header]
    for r in rows:
        lines.append(
            f"{r['n']:>3} {r['variant']:<10} {r['obtained']:>12.8f} "
            f"{r['reference']:>12.8f} {r['abs_error']:>9.1e} "
            f"{r['tolerance']:>8.0e} {r['seconds']:>6.1f}s {r['status']}"
        )
    lines.append(
        f"{len(rows) - failures}/{len(rows)} rows pass"
        + ("" if failures == 0 else f" ({failures} FAILED)")
    )
    payload = {"table_version": reference.TABLE_VERSION, "rows": rows}
    return CommandOutcome(3 if failures else 0, "\n".join(lines), [], payload)


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="maxpoly",
        description="Largest small even n-gon toolkit: build, solve, certify, relax, render, reproduce.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p, with_n=True):
        if with_n:
            p.add_argument("n", type=int, help="even vertex count (4..24)")
            p.add_argument("--allow-large", action="store_true",
                           help="lift the n cap (sizes grow quickly)")
        p.add_argument("--json", action="store_true", help="machine-readable stdout")

    p = sub.add_parser("solve", help="multistart local solve")
    add_common(p)
    p.add_argument("--symmetric", action="store_true", help="symmetry-reduced program")
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write result JSON here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="interval-certify a stored result")
    p.add_argument("result", help="result JSON from `solve --out`")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", help="write certificate JSON here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("relax", help="export a moment relaxation")
    add_common(p)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--sdpa", help="output .dat-s path (sidecar gets .json suffix)")
    p.add_argument("--stats", action="store_true", help="print sizes only")
    p.add_argument("--relaxed-closing", action="store_true",
                   help="closing edge as <= 1 instead of equality")
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("build", help="emit the quadratic program as JSON")
    add_common(p)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--relaxed-closing", action="store_true")
    p.add_argument("--out", help="write program JSON here")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("render", help="SVG of a stored result's polygon")
    p.add_argument("result")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", help="output SVG path")
    p.add_argument("--no-graph", action="store_true", help="omit diameter-graph chords")
    p.add_argument("--tol", type=float, default=geo.DEFAULT_GRAPH_TOL)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("reproduce", help="run the full reproduction table")
    p.add_argument("--json", action="store_true")
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reproduce)

    return top


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        outcome: CommandOutcome = args.func(args)
    except (geo.NotSmallPolygonError, ic.CertificationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 4
    if getattr(args, "json", False) and outcome.payload is not None:
        print(json.dumps(outcome.payload, indent=1, sort_keys=True))
    else:
        print(outcome.summary)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
