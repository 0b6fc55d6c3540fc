#!/usr/bin/env python3
"""Export the order-2 moment relaxations used in the size table.

Produces SDPA sparse files plus sidecars for (n=10, 12) x (full,
symmetric) into scripts/out/.  These are ready for any SDPA-format SDP
solver; `maxpoly.moment_relaxation.extract` validates an imported moment
vector afterwards.
"""

import pathlib
import sys

from maxpoly import build_program, build_relaxation, export_sdpa, stats
from maxpoly.moment_relaxation import sidecar_json

OUT = pathlib.Path(__file__).resolve().parent / "out"


def main() -> int:
    OUT.mkdir(exist_ok=True)
    for n in (10, 12):
        for symmetric in (False, True):
            tag = f"n{n}_{'sym' if symmetric else 'full'}_d2"
            inst = build_relaxation(build_program(n, symmetric=symmetric), 2)
            st = stats(inst)
            (OUT / f"{tag}.dat-s").write_text(export_sdpa(inst))
            (OUT / f"{tag}.dat-s.json").write_text(sidecar_json(inst))
            print(
                f"{tag}: moment vars {st.num_moment_vars}, "
                f"moment matrix {st.moment_matrix_size}, "
                f"{st.localizing_count} localizers"
            )
    print(f"artifacts in {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
