"""Order-d moment relaxations of the polygon programs, with substitutions.

The circle equalities x_i^2 + y_i^2 = 1 are consumed structurally: every
monomial is normalized by y_i^2 -> 1 - x_i^2 until no y exponent exceeds
1, so the moment vector ranges over the reduced monomial set only.  That
reproduces the published relaxation sizes exactly (the moment-vector
counts exclude the constant, which is pinned to 1 rather than kept as a
variable).

The relaxation of order d consists of the moment matrix over the degree-d
basis, one localizing matrix over the degree-(d-1) basis per inequality,
and, for a closing-edge equality, paired scalar rows L(h q) = 0 encoded
as a +/- diagonal block.  Instances are exported in SDPA sparse format
(".dat-s") with a JSON sidecar mapping decision-variable indices to
monomials; solving is delegated to external SDP solvers, and externally
produced moment vectors can be imported for extraction and the rank-based
optimality check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .formulation import Assignment, QuadExpr, QuadraticProgram

__all__ = [
    "Monomial",
    "MomentBasis",
    "Block",
    "SDPInstance",
    "RelaxationStats",
    "Extraction",
    "monomial_basis",
    "build_relaxation",
    "stats",
    "export_sdpa",
    "sidecar_json",
    "extract",
    "moments_from_assignment",
    "reconstruct_blocks",
]

SIDECAR_VERSION = "maxpoly-moments/1"

Monomial = tuple[int, ...]  # exponents aligned with the program's variable order


@dataclass(frozen=True)
class MomentBasis:
    """Monomials of bounded degree in substitution normal form, graded-lex."""

    order: int
    variables: tuple[str, ...]
    monomials: tuple[Monomial, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "index", {m: i for i, m in enumerate(self.monomials)}
        )

    def __len__(self) -> int:
        return len(self.monomials)


class _VarTable:
    """Variable layout: x slots, y slots, and the y -> partner-x map."""

    def __init__(self, variables: tuple[str, ...]):
        self.variables = variables
        self.pos = {v: i for i, v in enumerate(variables)}
        self.y_slots = [i for i, v in enumerate(variables) if v.startswith("y")]
        self.partner = {}
        for i in self.y_slots:
            xname = "x" + variables[i][1:]
            if xname not in self.pos:
                raise ValueError(f"variable {variables[i]} lacks partner {xname}")
            self.partner[i] = self.pos[xname]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _mono_deg(m: Monomial) -> int:
    return sum(m)


def _normalize(table: _VarTable, mono: Monomial, coef: float = 1.0) -> dict[Monomial, float]:
    """Rewrite y_i^2 -> 1 - x_i^2 until every y exponent is at most 1."""
    out: dict[Monomial, float] = {}
    stack = [(mono, coef)]
    while stack:
        m, c = stack.pop()
        for ys in table.y_slots:
            if m[ys] >= 2:
                base = list(m)
                base[ys] -= 2
                stack.append((tuple(base), c))
                xs = table.partner[ys]
                sq = list(base)
                sq[xs] += 2
                stack.append((tuple(sq), -c))
                break
        else:
            out[m] = out.get(m, 0.0) + c
    return {m: c for m, c in out.items() if c != 0.0}


def _expr_to_monos(table: _VarTable, e: QuadExpr) -> dict[Monomial, float]:
    nvar = len(table.variables)
    zero = (0,) * nvar
    out: dict[Monomial, float] = {}
    if e.const:
        out[zero] = e.const
    for v, c in e.lin.items():
        m = list(zero)
        m[table.pos[v]] += 1
        m = tuple(m)
        out[m] = out.get(m, 0.0) + c
    for (a, b), c in e.quad.items():
        m = list(zero)
        m[table.pos[a]] += 1
        m[table.pos[b]] += 1
        m = tuple(m)
        out[m] = out.get(m, 0.0) + c
    return out


def monomial_basis(p: QuadraticProgram, degree: int) -> MomentBasis:
    """All substitution-normal monomials of total degree <= degree."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    table = _VarTable(p.variables)
    nvar = len(p.variables)
    x_slots = [i for i in range(nvar) if i not in set(table.y_slots)]
    monos: list[Monomial] = []

    def x_parts(slots: list[int], budget: int, acc: list[int]):
        if not slots:
            monos.append(tuple(acc))
            return
        head, rest = slots[0], slots[1:]
        for e in range(budget + 1):
            nxt = list(acc)
            nxt[head] = e
            x_parts(rest, budget - e, nxt)

    for ycount in range(min(degree, len(table.y_slots)) + 1):
        for ys in combinations(table.y_slots, ycount):
            acc = [0] * nvar
            for s in ys:
                acc[s] = 1
            x_parts(x_slots, degree - ycount, acc)

    monos.sort(key=lambda m: (_mono_deg(m), m))
    return MomentBasis(order=degree, variables=p.variables, monomials=tuple(monos))


@dataclass(frozen=True)
class Block:
    """One PSD block: entry (r, c) with r <= c maps to a moment linear form.

    Forms are {moment_index: coefficient}; index 0 is the pinned constant.
    `kind` is "moment", "localizing", or "equality-pair" (+/- diagonal
    rows enforcing a polynomial equality on moments).
    """

    tag: str
    kind: str
    size: int
    entries: dict[tuple[int, int], dict[int, float]]


@dataclass(frozen=True)
class SDPInstance:
    n: int
    order: int
    symmetric: bool
    variables: tuple[str, ...]
    monomials: tuple[Monomial, ...]  # moment ids: index 0 = constant (pinned)
    moment_basis_size: int  # rows of the moment matrix (degree <= d monomials)
    blocks: tuple[Block, ...]
    objective: dict[int, float]  # moment index -> coefficient

    @property
    def num_moment_vars(self) -> int:
        return len(self.monomials) - 1


@dataclass(frozen=True)
class RelaxationStats:
    num_moment_vars: int
    moment_matrix_size: int
    localizing_sizes: tuple[tuple[str, int], ...]
    equality_sizes: tuple[tuple[str, int], ...]

    @property
    def localizing_count(self) -> int:
        return len(self.localizing_sizes)


@dataclass(frozen=True)
class Extraction:
    upper_bound: float
    moment_matrix_rank: int
    lower_order_rank: int
    flat: bool
    candidate: Assignment
    y_moments: tuple[float, ...]


def build_relaxation(p: QuadraticProgram, order: int) -> SDPInstance:
    """Moment matrix + localizing blocks for relaxation order d = `order`."""
    if order < 1:
        raise ValueError("relaxation order must be >= 1")
    table = _VarTable(p.variables)
    full = monomial_basis(p, 2 * order)
    index = full.index  # type: ignore[attr-defined]
    basis_d = [m for m in full.monomials if _mono_deg(m) <= order]
    basis_loc = [m for m in full.monomials if _mono_deg(m) <= order - 1]
    basis_eq = [m for m in full.monomials if _mono_deg(m) <= 2 * (order - 1)]

    def form_of(poly: dict[Monomial, float]) -> dict[int, float]:
        out: dict[int, float] = {}
        for m, c in poly.items():
            out[index[m]] = out.get(index[m], 0.0) + c
        return {k: v for k, v in out.items() if v != 0.0}

    blocks: list[Block] = []
    entries: dict[tuple[int, int], dict[int, float]] = {}
    for i, bi in enumerate(basis_d):
        for j in range(i, len(basis_d)):
            prod = _mono_mul(bi, basis_d[j])
            entries[(i, j)] = form_of(_normalize(table, prod))
    blocks.append(Block("moment", "moment", len(basis_d), entries))

    for c in p.constraints:
        if c.kind == "circle-equality":
            continue  # consumed by the substitution normal form
        if c.kind == "less-equal-one":
            g = QuadExpr({}, {}, 1.0) - c.expr
        elif c.kind in ("box", "order-cut", "nonneg"):
            g = c.expr
        elif c.kind == "equal-one":
            h = _expr_to_monos(table, c.expr - QuadExpr({}, {}, 1.0))
            ent: dict[tuple[int, int], dict[int, float]] = {}
            for t, q in enumerate(basis_eq):
                row: dict[Monomial, float] = {}
                for m, cf in h.items():
                    for mm, cc in _normalize(table, _mono_mul(m, q), cf).items():
                        row[mm] = row.get(mm, 0.0) + cc
                form = form_of(row)
                ent[(2 * t, 2 * t)] = form
                ent[(2 * t + 1, 2 * t + 1)] = {k: -v for k, v in form.items()}
            blocks.append(
                Block(c.tag, "equality-pair", 2 * len(basis_eq), ent)
            )
            continue
        else:
            raise ValueError(f"unhandled constraint kind {c.kind!r}")
        gm = _expr_to_monos(table, g)
        ent = {}
        for i, bi in enumerate(basis_loc):
            for j in range(i, len(basis_loc)):
                prod = _mono_mul(bi, basis_loc[j])
                row = {}
                for m, cf in gm.items():
                    for mm, cc in _normalize(table, _mono_mul(m, prod), cf).items():
                        row[mm] = row.get(mm, 0.0) + cc
                ent[(i, j)] = form_of(row)
        blocks.append(Block(c.tag, "localizing", len(basis_loc), ent))

    obj_monos: dict[Monomial, float] = {}
    for mono, cf in _expr_to_monos(table, p.objective).items():
        for mm, cc in _normalize(table, mono, cf).items():
            obj_monos[mm] = obj_monos.get(mm, 0.0) + cc
    objective = form_of(obj_monos)

    return SDPInstance(
        n=p.n,
        order=order,
        symmetric=p.symmetric,
        variables=p.variables,
        monomials=full.monomials,
        moment_basis_size=len(basis_d),
        blocks=tuple(blocks),
        objective=objective,
    )


def stats(s: SDPInstance) -> RelaxationStats:
    """Exact sizes; the pinned constant is excluded from the moment count."""
    loc = tuple((b.tag, b.size) for b in s.blocks if b.kind == "localizing")
    eqs = tuple((b.tag, b.size) for b in s.blocks if b.kind == "equality-pair")
    return RelaxationStats(
        num_moment_vars=s.num_moment_vars,
        moment_matrix_size=s.moment_basis_size,
        localizing_sizes=loc,
        equality_sizes=eqs,
    )


def moments_from_assignment(s: SDPInstance, a: Assignment) -> np.ndarray:
    """Moment vector of the Dirac measure at a feasible assignment."""
    xnames = [v for v in s.variables if v.startswith("x")]
    ynames = [v for v in s.variables if v.startswith("y")]
    if len(a.x) != len(xnames):
        raise ValueError(f"assignment has {len(a.x)} x values, instance wants {len(xnames)}")
    vals = dict(zip(xnames, a.x))
    vals.update(zip(ynames, a.derived_y()))
    z = np.array([vals[v] for v in s.variables])
    out = np.empty(s.num_moment_vars)
    for k, mono in enumerate(s.monomials[1:], start=1):
        t = 1.0
        for slot, e in enumerate(mono):
            if e:
                t *= z[slot] ** e
        out[k - 1] = t
    return out


def _form_value(form: dict[int, float], moments: np.ndarray) -> float:
    total = 0.0
    for idx, c in form.items():
        total += c if idx == 0 else c * moments[idx - 1]
    return total


def reconstruct_blocks(s: SDPInstance, moments: np.ndarray) -> list[tuple[str, np.ndarray]]:
    """Numeric block matrices at a given moment vector (symmetric fill)."""
    out = []
    for b in s.blocks:
        mat = np.zeros((b.size, b.size))
        for (i, j), form in b.entries.items():
            v = _form_value(form, moments)
            mat[i, j] = v
            mat[j, i] = v
        out.append((b.tag, mat))
    return out


def extract(s: SDPInstance, moments) -> Extraction:
    """Objective bound, moment-matrix rank pattern, and the point candidate.

    `flat` compares the rank of the order-d moment matrix with its
    order-(d-1) principal submatrix (the bases nest under the graded
    order); equality is the numerical certificate that the relaxation
    value is attained by an atomic measure.
    """
    moments = np.asarray(moments, dtype=float)
    if moments.shape != (s.num_moment_vars,):
        raise ValueError(
            f"moment vector has shape {moments.shape}, expected ({s.num_moment_vars},)"
        )
    mblock = s.blocks[0]
    mat = np.zeros((mblock.size, mblock.size))
    for (i, j), form in mblock.entries.items():
        v = _form_value(form, moments)
        mat[i, j] = v
        mat[j, i] = v
    if mblock.size and float(np.abs(mat - mat.T).max()) > 1e-9:
        raise ValueError("reconstructed moment matrix is not symmetric")

    def rank_of(m: np.ndarray) -> int:
        if m.size == 0:
            return 0
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[0] == 0.0:
            return 0
        return int((sv > 1e-6 * sv[0]).sum())

    prev_size = sum(
        1 for m in s.monomials if _mono_deg(m) <= s.order - 1
    )
    rank_d = rank_of(mat)
    rank_prev = rank_of(mat[:prev_size, :prev_size])

    deg1 = {}
    for k, mono in enumerate(s.monomials[1:], start=1):
        if _mono_deg(mono) == 1:
            slot = next(i for i, e in enumerate(mono) if e)
            deg1[s.variables[slot]] = float(moments[k - 1])
    xs = tuple(deg1.get(v, 0.0) for v in s.variables if v.startswith("x"))
    ys = tuple(deg1.get(v, 0.0) for v in s.variables if v.startswith("y"))
    candidate = Assignment(tuple(min(max(v, 0.0), 1.0) for v in xs))

    return Extraction(
        upper_bound=_form_value(s.objective, moments),
        moment_matrix_rank=rank_d,
        lower_order_rank=rank_prev,
        flat=rank_d == rank_prev,
        candidate=candidate,
        y_moments=ys,
    )


# -- SDPA sparse export --------------------------------------------------------

def export_sdpa(s: SDPInstance) -> str:
    """SDPA sparse format (".dat-s").

    The file encodes: minimize c^T u subject to sum_k u_k F_k - F0 >= 0
    (block diagonal), where u is the moment vector (constant excluded).
    Maximizing the area means c = -objective coefficients; add the
    sidecar's `objective_constant` and negate to recover the area bound.
    Entries are upper-triangle only and deterministically ordered.
    """
    m = s.num_moment_vars
    lines = [
        '"maxpoly moment relaxation: order %d, n=%d, %s"'
        % (s.order, s.n, "symmetric" if s.symmetric else "full"),
        f"{m}",
        f"{len(s.blocks)}",
        " ".join(str(b.size) for b in s.blocks),
    ]
    c = [0.0] * (m + 1)
    for idx, coef in s.objective.items():
        c[idx] = -coef
    lines.append(" ".join(_fmt(v) for v in c[1:]))
    body: list[str] = []
    for bno, b in enumerate(s.blocks, start=1):
        for (i, j) in sorted(b.entries):
            form = b.entries[(i, j)]
            for idx in sorted(form):
                coef = form[idx]
                if coef == 0.0:
                    continue
                if idx == 0:
                    # F0 carries the negated constant part
                    body.append(f"0 {bno} {i + 1} {j + 1} {_fmt(-coef)}")
                else:
                    body.append(f"{idx} {bno} {i + 1} {j + 1} {_fmt(coef)}")
    # SDPA convention groups by matrix number; sort rows accordingly
    body.sort(key=lambda ln: (int(ln.split()[0]), int(ln.split()[1]),
                              int(ln.split()[2]), int(ln.split()[3])))
    lines.extend(body)
    return "\n".join(lines) + "\n"


def _fmt(v: float) -> str:
    return repr(float(v))


def _mono_doc(variables: tuple[str, ...], mono: Monomial) -> dict[str, int]:
    return {variables[i]: e for i, e in enumerate(mono) if e}


def sidecar_json(s: SDPInstance) -> str:
    """Self-description of an exported instance: index -> monomial map."""
    doc = {
        "version": SIDECAR_VERSION,
        "n": s.n,
        "order": s.order,
        "symmetric": s.symmetric,
        "variables": list(s.variables),
        "objective_constant": s.objective.get(0, 0.0),
        "objective_sense": "file minimizes the negated area form",
        "num_moment_vars": s.num_moment_vars,
        "moment_matrix_size": s.moment_basis_size,
        "moments": {
            str(k): _mono_doc(s.variables, mono)
            for k, mono in enumerate(s.monomials)
            if k > 0
        },
        "blocks": [
            {"index": i + 1, "tag": b.tag, "kind": b.kind, "size": b.size}
            for i, b in enumerate(s.blocks)
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=True)
