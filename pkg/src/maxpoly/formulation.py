"""Exact quadratic programs whose maxima are the largest small even n-gons.

For even n the optimal diameter graph is a cycle on n-1 vertices plus one
pendant edge.  Anchoring the pendant edge at v_n = (0,0), v_{n/2} = (0,1)
and walking the cycle in unit steps writes every vertex as an affine
combination (coefficients in {-1, 0, +1}) of variable pairs (x_i, y_i)
confined to the unit circle.  The resulting program maximizes the polygon
area subject to all pairwise squared distances being at most 1, the
cycle-closing pair being at distance exactly 1, the circle equalities
x_i^2 + y_i^2 = 1, and box bounds.

Two chains grow from the anchor: u_k steps through the even-indexed
variable pairs starting at (x1, y1), w_k through the odd-indexed pairs
starting at (-x1, y1), for k = 0 .. n/2 - 2:

    u_k = (x1 + sum_{i=1..k} (-1)^i x_{2i},  y1 + sum_{i=1..k} (-1)^i y_{2i})
    w_k = (sum_{i=0..k} (-1)^{i+1} x_{2i+1}, sum_{i=0..k} (-1)^i y_{2i+1})

and the chain members are renamed to polygon indices via

    v_i       = u_{2i-1}      i = 1 .. floor((n-2)/4)
    v_{n-i}   = w_{2i-1}      i = 1 .. floor((n-2)/4)
    v_{n/2-i} = w_{2(i-1)}    i = 1 .. ceil((n-2)/4)
    v_{n/2+i} = u_{2(i-1)}    i = 1 .. ceil((n-2)/4)

so that v_1 .. v_n traverses the polygon boundary (clockwise; polygon
constructors flip it to counterclockwise).  Consecutive chain differences
collapse to single variable pairs, which is what lets the y variables be
eliminated against the circle equalities downstream.

The swap x_{2i} <-> x_{2i+1} (and y likewise) reflects the polygon through
the pendant-edge axis and leaves the program invariant; identifying the
swapped pairs yields the symmetry-reduced program.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

__all__ = [
    "LinExpr",
    "QuadExpr",
    "VertexExprs",
    "QuadConstraint",
    "QuadraticProgram",
    "Assignment",
    "EvalReport",
    "SchemaError",
    "vertex_expressions",
    "area_objective",
    "area_formulas",
    "build_program",
    "reduce_symmetric",
    "apply_sigma",
    "sigma_map",
    "expand_assignment",
    "evaluate",
    "assignment_to_polygon",
    "to_json",
    "from_json",
    "diameter_edge_pairs",
    "closing_pair",
    "bound_implied_pairs",
]

JSON_VERSION = "maxpoly-qp/1"

# constraint kinds and their residual semantics:
#   less-equal-one              expr <= 1      residual max(0, value - 1)
#   equal-one, circle-equality  expr == 1      residual |value - 1|
#   box, order-cut, nonneg      expr >= 0      residual max(0, -value)
GEQ_ZERO_KINDS = ("box", "order-cut", "nonneg")


class SchemaError(ValueError):
    """Program JSON violates the maxpoly-qp/1 schema; message names the path."""


def xvar(i: int) -> str:
    return f"x{i}"


def yvar(i: int) -> str:
    return f"y{i}"


@dataclass(frozen=True)
class LinExpr:
    """Affine expression: coefficient map plus constant, zero entries pruned."""

    coeffs: dict[str, float]
    const: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", {v: c for v, c in self.coeffs.items() if c != 0.0}
        )

    def __add__(self, other: "LinExpr") -> "LinExpr":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, 0.0) + c
        return LinExpr(out, self.const + other.const)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + (-other)

    def __neg__(self) -> "LinExpr":
        return LinExpr({v: -c for v, c in self.coeffs.items()}, -self.const)

    def scaled(self, s: float) -> "LinExpr":
        return LinExpr({v: s * c for v, c in self.coeffs.items()}, s * self.const)

    def value(self, vals: dict[str, float]) -> float:
        return self.const + sum(c * vals[v] for v, c in self.coeffs.items())

    def substituted(self, mapping: dict[str, str]) -> "LinExpr":
        out: dict[str, float] = {}
        for v, c in self.coeffs.items():
            w = mapping.get(v, v)
            out[w] = out.get(w, 0.0) + c
        return LinExpr(out, self.const)


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class QuadExpr:
    """Quadratic polynomial: unordered-pair map + linear map + constant."""

    quad: dict[tuple[str, str], float]
    lin: dict[str, float]
    const: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "quad", {k: c for k, c in self.quad.items() if c != 0.0})
        object.__setattr__(self, "lin", {v: c for v, c in self.lin.items() if c != 0.0})

    @classmethod
    def zero(cls) -> "QuadExpr":
        return cls({}, {}, 0.0)

    @classmethod
    def from_linear(cls, e: LinExpr) -> "QuadExpr":
        return cls({}, dict(e.coeffs), e.const)

    @classmethod
    def product(cls, a: LinExpr, b: LinExpr) -> "QuadExpr":
        quad: dict[tuple[str, str], float] = {}
        for va, ca in a.coeffs.items():
            for vb, cb in b.coeffs.items():
                k = _pair(va, vb)
                quad[k] = quad.get(k, 0.0) + ca * cb
        lin: dict[str, float] = {}
        for va, ca in a.coeffs.items():
            lin[va] = lin.get(va, 0.0) + ca * b.const
        for vb, cb in b.coeffs.items():
            lin[vb] = lin.get(vb, 0.0) + cb * a.const
        return cls(quad, lin, a.const * b.const)

    def __add__(self, other: "QuadExpr") -> "QuadExpr":
        quad = dict(self.quad)
        for k, c in other.quad.items():
            quad[k] = quad.get(k, 0.0) + c
        lin = dict(self.lin)
        for v, c in other.lin.items():
            lin[v] = lin.get(v, 0.0) + c
        return QuadExpr(quad, lin, self.const + other.const)

    def __sub__(self, other: "QuadExpr") -> "QuadExpr":
        return self + other.scaled(-1.0)

    def scaled(self, s: float) -> "QuadExpr":
        return QuadExpr(
            {k: s * c for k, c in self.quad.items()},
            {v: s * c for v, c in self.lin.items()},
            s * self.const,
        )

    def value(self, vals: dict[str, float]) -> float:
        total = self.const
        for v, c in self.lin.items():
            total += c * vals[v]
        for (a, b), c in self.quad.items():
            total += c * vals[a] * vals[b]
        return total

    def variables(self) -> set[str]:
        out = set(self.lin)
        for a, b in self.quad:
            out.add(a)
            out.add(b)
        return out

    def substituted(self, mapping: dict[str, str]) -> "QuadExpr":
        quad: dict[tuple[str, str], float] = {}
        for (a, b), c in self.quad.items():
            k = _pair(mapping.get(a, a), mapping.get(b, b))
            quad[k] = quad.get(k, 0.0) + c
        lin: dict[str, float] = {}
        for v, c in self.lin.items():
            w = mapping.get(v, v)
            lin[w] = lin.get(w, 0.0) + c
        return QuadExpr(quad, lin, self.const)


@dataclass(frozen=True)
class VertexExprs:
    """Affine coordinate expressions for v_1 .. v_n (1-based access)."""

    n: int
    coords: tuple[tuple[LinExpr, LinExpr], ...]

    def vertex(self, i: int) -> tuple[LinExpr, LinExpr]:
        return self.coords[i - 1]


@dataclass(frozen=True)
class QuadConstraint:
    """Tagged degree-<=2 constraint; semantics are fixed by `kind`."""

    expr: QuadExpr
    kind: str
    tag: str

    def residual(self, vals: dict[str, float]) -> float:
        v = self.expr.value(vals)
        if self.kind == "less-equal-one":
            return max(0.0, v - 1.0)
        if self.kind in ("equal-one", "circle-equality"):
            return abs(v - 1.0)
        return max(0.0, -v)  # box / order-cut / nonneg


@dataclass(frozen=True)
class QuadraticProgram:
    n: int
    variables: tuple[str, ...]
    objective: QuadExpr
    constraints: tuple[QuadConstraint, ...]
    symmetric: bool = False
    relax_closing_edge: bool = False
    order_cut: bool = False

    def constraint(self, tag: str) -> QuadConstraint:
        for c in self.constraints:
            if c.tag == tag:
                return c
        raise KeyError(tag)

    def num_x(self) -> int:
        return sum(1 for v in self.variables if v.startswith("x"))


@dataclass(frozen=True)
class Assignment:
    """Values for the free x variables, optionally with explicit y.

    Absent y is derived as y_i = +sqrt(1 - x_i^2).  Explicit y must be
    nonnegative and satisfy the circle equalities to within 1e-6.
    """

    x: tuple[float, ...]
    y: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        if self.y is not None:
            object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        slack = 1e-9
        for i, v in enumerate(self.x):
            if not math.isfinite(v) or v < -slack or v > 1.0 + slack:
                raise ValueError(f"x{i + 1}={v} outside [0, 1]")
        if self.x and self.x[0] > 0.5 + slack:
            raise ValueError(f"x1={self.x[0]} exceeds 1/2")
        if self.y is not None:
            if len(self.y) != len(self.x):
                raise ValueError("x and y lengths differ")
            for i, (a, b) in enumerate(zip(self.x, self.y)):
                if b < -1e-12:
                    raise ValueError(f"y{i + 1}={b} negative")
                if abs(a * a + b * b - 1.0) > 1e-6:
                    raise ValueError(
                        f"pair {i + 1} off the unit circle: x^2+y^2 = {a * a + b * b}"
                    )

    def derived_y(self) -> tuple[float, ...]:
        if self.y is not None:
            return self.y
        out = []
        for v in self.x:
            if v > 1.0:
                raise ValueError(f"cannot derive y for x={v} > 1")
            out.append(math.sqrt(max(0.0, 1.0 - v * v)))
        return tuple(out)


@dataclass(frozen=True)
class EvalReport:
    objective: float
    max_violation: float
    residuals: dict[str, float]


def _require_even(n: int, minimum: int = 4):
    if n % 2 != 0 or n < minimum:
        raise ValueError(f"n must be even and >= {minimum}, got {n}")


def vertex_expressions(n: int) -> VertexExprs:
    """Affine vertex coordinates for the cycle-plus-pendant configuration."""
    _require_even(n)
    half = n // 2
    u: list[tuple[LinExpr, LinExpr]] = []
    w: list[tuple[LinExpr, LinExpr]] = []
    for k in range(half - 1):
        ux = {xvar(1): 1.0}
        uy = {yvar(1): 1.0}
        for i in range(1, k + 1):
            s = -1.0 if i % 2 == 1 else 1.0
            ux[xvar(2 * i)] = s
            uy[yvar(2 * i)] = s
        wx = {}
        wy = {}
        for i in range(k + 1):
            sx = 1.0 if i % 2 == 1 else -1.0
            wx[xvar(2 * i + 1)] = sx
            wy[yvar(2 * i + 1)] = -sx
        u.append((LinExpr(ux), LinExpr(uy)))
        w.append((LinExpr(wx), LinExpr(wy)))
    coords: dict[int, tuple[LinExpr, LinExpr]] = {
        n: (LinExpr({}), LinExpr({})),
        half: (LinExpr({}), LinExpr({}, 1.0)),
    }
    for i in range(1, (n - 2) // 4 + 1):
        coords[i] = u[2 * i - 1]
        coords[n - i] = w[2 * i - 1]
    for i in range(1, math.ceil((n - 2) / 4) + 1):
        coords[half - i] = w[2 * (i - 1)]
        coords[half + i] = u[2 * (i - 1)]
    return VertexExprs(n=n, coords=tuple(coords[i] for i in range(1, n + 1)))


def area_objective(n: int) -> QuadExpr:
    """Polygon area as a quadratic in (x_i, y_i).

    The boundary sum skips indices n/2 - 1 and n/2; the quadrilateral they
    span with the two anchor vertices contributes exactly x1.
    """
    ve = vertex_expressions(n)
    half = n // 2
    total = QuadExpr({}, {xvar(1): 1.0})
    for i in range(1, n - 1):
        if i in (half - 1, half):
            continue
        xi, yi = ve.vertex(i)
        xj, yj = ve.vertex(i + 1)
        term = QuadExpr.product(yi, xj) - QuadExpr.product(xi, yj)
        total = total + term.scaled(0.5)
    return total


def area_formulas(n: int, a: Assignment) -> tuple[float, float, float]:
    """Evaluate the three equivalent area expressions along distinct routes.

    Returns (boundary sum over i = 1..n-2, pendant-quadrilateral form,
    trapezoid form).  All agree to roundoff on any assignment.
    """
    ve = vertex_expressions(n)
    vals = _value_map(n, a)
    pts = [(vx.value(vals), vy.value(vals)) for vx, vy in ve.coords]
    half = n // 2

    s1 = 0.0
    for i in range(n - 2):  # pairs (v_i, v_{i+1}), terms with v_n vanish
        xi, yi = pts[i]
        xj, yj = pts[i + 1]
        s1 += yi * xj - xi * yj
    s1 *= 0.5

    s2 = 0.0
    for i in list(range(1, half - 1)) + list(range(half + 1, n - 1)):
        xi, yi = pts[i - 1]
        xj, yj = pts[i]
        s2 += yi * xj - xi * yj
    s2 = vals[xvar(1)] + 0.5 * s2

    s3 = 0.0
    for i in range(n):
        xi, yi = pts[i]
        xj, yj = pts[(i + 1) % n]
        s3 += (xi + xj) * (yi - yj)
    s3 *= 0.5
    return (s1, s2, s3)


def closing_pair(n: int) -> tuple[int, int]:
    """Vertex pair closing the (n-1)-cycle: (floor(n/4), ceil(3n/4))."""
    return (n // 4, math.ceil(3 * n / 4))


def bound_implied_pairs(n: int) -> set[frozenset[int]]:
    """Pairs within distance 1 whenever x1 <= 1/2 and (x1, y1) is on the circle."""
    half = n // 2
    return {
        frozenset((half - 1, half + 1)),
        frozenset((half - 1, half)),
        frozenset((half, half + 1)),
    }


def diameter_edge_pairs(n: int) -> set[frozenset[int]]:
    """Index pairs at distance exactly 1 by construction, closing pair included."""
    _require_even(n)
    half = n // 2
    uidx: dict[int, int] = {}
    widx: dict[int, int] = {}
    for i in range(1, (n - 2) // 4 + 1):
        uidx[2 * i - 1] = i
        widx[2 * i - 1] = n - i
    for i in range(1, math.ceil((n - 2) / 4) + 1):
        widx[2 * (i - 1)] = half - i
        uidx[2 * (i - 1)] = half + i
    edges = {
        frozenset((half, n)),       # pendant edge
        frozenset((n, uidx[0])),    # anchor to u_0
        frozenset((n, widx[0])),    # anchor to w_0
    }
    for k in range(half - 2):
        edges.add(frozenset((uidx[k], uidx[k + 1])))
        edges.add(frozenset((widx[k], widx[k + 1])))
    edges.add(frozenset(closing_pair(n)))
    return edges


def _dist_sq_expr(ve: VertexExprs, i: int, j: int) -> QuadExpr:
    xi, yi = ve.vertex(i)
    xj, yj = ve.vertex(j)
    dx = xi - xj
    dy = yi - yj
    return QuadExpr.product(dx, dx) + QuadExpr.product(dy, dy)


def build_program(
    n: int,
    symmetric: bool = False,
    relax_closing_edge: bool = False,
    order_cut: bool | None = None,
    include_bound_implied: bool = False,
) -> QuadraticProgram:
    """Assemble the full (or symmetry-reduced) quadratic program.

    Pairwise <= 1 constraints cover every vertex pair that is not a
    diameter-graph edge, not the constant pair (n/2, n), and not one of the
    three bound-implied pairs (set `include_bound_implied` to keep those
    for auditing).  The closing pair is an equality unless
    `relax_closing_edge`.  The order cut x2 >= x3 defaults to on for n = 8
    only, where it matches the published constraint list; its general
    safety alongside the closing-edge orientation is unproven.
    """
    _require_even(n)
    if order_cut is None:
        order_cut = n == 8
    m = n - 3
    ve = vertex_expressions(n)
    variables = tuple(xvar(i) for i in range(1, m + 1)) + tuple(
        yvar(i) for i in range(1, m + 1)
    )
    cons: list[QuadConstraint] = []

    a, b = closing_pair(n)
    cons.append(
        QuadConstraint(
            _dist_sq_expr(ve, a, b),
            "less-equal-one" if relax_closing_edge else "equal-one",
            f"closing:{a}:{b}",
        )
    )

    half = n // 2
    excluded = diameter_edge_pairs(n) | {frozenset((half, n))}
    if not include_bound_implied:
        excluded |= bound_implied_pairs(n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            fs = frozenset((i, j))
            if fs in excluded or fs == frozenset((a, b)):
                continue
            cons.append(
                QuadConstraint(_dist_sq_expr(ve, i, j), "less-equal-one", f"pair:{i}:{j}")
            )

    for i in range(1, m + 1):
        cons.append(
            QuadConstraint(
                QuadExpr({(xvar(i), xvar(i)): 1.0, (yvar(i), yvar(i)): 1.0}, {}),
                "circle-equality",
                f"circle:{i}",
            )
        )

    cons.append(QuadConstraint(QuadExpr({}, {xvar(1): 1.0}), "box", "box:x1:lb"))
    cons.append(QuadConstraint(QuadExpr({}, {xvar(1): -1.0}, 0.5), "box", "box:x1:ub"))
    for i in range(2, m + 1):
        cons.append(QuadConstraint(QuadExpr({}, {xvar(i): 1.0}), "box", f"box:x{i}:lb"))
        cons.append(
            QuadConstraint(QuadExpr({}, {xvar(i): -1.0}, 1.0), "box", f"box:x{i}:ub")
        )
    for i in range(1, m + 1):
        cons.append(QuadConstraint(QuadExpr({}, {yvar(i): 1.0}), "nonneg", f"nonneg:y{i}"))

    if order_cut and not symmetric and m >= 3:
        cons.append(
            QuadConstraint(
                QuadExpr({}, {xvar(2): 1.0, xvar(3): -1.0}), "order-cut", "order-cut:x2:x3"
            )
        )

    prog = QuadraticProgram(
        n=n,
        variables=variables,
        objective=area_objective(n),
        constraints=tuple(cons),
        symmetric=False,
        relax_closing_edge=relax_closing_edge,
        order_cut=order_cut and not symmetric,
    )
    return reduce_symmetric(prog) if symmetric else prog


def sigma_map(n: int, var_count: int | None = None) -> dict[str, str]:
    """Variable swap x_{2i} <-> x_{2i+1} (and y likewise); x1, y1 fixed."""
    m = var_count if var_count is not None else n - 3
    mapping: dict[str, str] = {}
    for i in range(2, m, 2):
        mapping[xvar(i)] = xvar(i + 1)
        mapping[xvar(i + 1)] = xvar(i)
        mapping[yvar(i)] = yvar(i + 1)
        mapping[yvar(i + 1)] = yvar(i)
    return mapping


def reduce_symmetric(p: QuadraticProgram) -> QuadraticProgram:
    """Identify the swappable variable pairs: x_{2i+1} -> x_{2i}, y likewise.

    Duplicate constraints (same kind and identical expression after the
    substitution) are merged, keeping the first tag.  Reducing an already
    reduced program returns an equal program.
    """
    if p.symmetric:
        return p
    m = p.n - 3
    mapping: dict[str, str] = {}
    for i in range(2, m, 2):
        mapping[xvar(i + 1)] = xvar(i)
        mapping[yvar(i + 1)] = yvar(i)
    keep = tuple(v for v in p.variables if v not in mapping)
    seen: dict[tuple, str] = {}
    cons: list[QuadConstraint] = []
    for c in p.constraints:
        expr = c.expr.substituted(mapping)
        if not expr.quad and not expr.lin:
            continue  # vacuous after identification (e.g. the order cut)
        key = (
            c.kind,
            tuple(sorted(expr.quad.items())),
            tuple(sorted(expr.lin.items())),
            expr.const,
        )
        if key in seen:
            continue
        seen[key] = c.tag
        cons.append(QuadConstraint(expr, c.kind, c.tag))
    return QuadraticProgram(
        n=p.n,
        variables=keep,
        objective=p.objective.substituted(mapping),
        constraints=tuple(cons),
        symmetric=True,
        relax_closing_edge=p.relax_closing_edge,
        order_cut=False,
    )


def _x_indices(p: QuadraticProgram) -> list[int]:
    return [int(v[1:]) for v in p.variables if v.startswith("x")]


def expand_assignment(p_or_n, a: Assignment) -> Assignment:
    """Expand a symmetric-form assignment to full form by duplicating pairs."""
    n = p_or_n.n if isinstance(p_or_n, QuadraticProgram) else int(p_or_n)
    m = n - 3
    reduced_count = (n - 2) // 2
    if len(a.x) != reduced_count:
        raise ValueError(
            f"expected {reduced_count} reduced x values for n={n}, got {len(a.x)}"
        )
    full = [a.x[0]]
    for v in a.x[1:]:
        full.append(v)
        full.append(v)
    full = full[:m]
    y = None
    if a.y is not None:
        yfull = [a.y[0]]
        for v in a.y[1:]:
            yfull.append(v)
            yfull.append(v)
        y = tuple(yfull[:m])
    return Assignment(tuple(full), y)


def apply_sigma(a: Assignment, n: int) -> Assignment:
    """Swap x_{2i} <-> x_{2i+1} (and y likewise) in a full-form assignment."""
    m = n - 3
    if len(a.x) != m:
        raise ValueError(
            f"sigma needs a full-form assignment with {m} x values, got {len(a.x)}"
        )

    def swap(vals: tuple[float, ...]) -> tuple[float, ...]:
        out = list(vals)
        for i in range(2, m, 2):
            out[i - 1], out[i] = out[i], out[i - 1]
        return tuple(out)

    return Assignment(swap(a.x), swap(a.y) if a.y is not None else None)


def _value_map(n: int, a: Assignment, variables: tuple[str, ...] | None = None) -> dict:
    names = variables
    if names is None:
        m = n - 3
        names = tuple(xvar(i) for i in range(1, m + 1)) + tuple(
            yvar(i) for i in range(1, m + 1)
        )
    xnames = [v for v in names if v.startswith("x")]
    ynames = [v for v in names if v.startswith("y")]
    if len(a.x) != len(xnames):
        raise ValueError(f"assignment has {len(a.x)} x values, program wants {len(xnames)}")
    vals = dict(zip(xnames, a.x))
    vals.update(zip(ynames, a.derived_y()))
    return vals


def evaluate(p: QuadraticProgram, a: Assignment) -> EvalReport:
    """Objective value and per-constraint residuals at an assignment."""
    vals = _value_map(p.n, a, p.variables)
    residuals = {c.tag: c.residual(vals) for c in p.constraints}
    return EvalReport(
        objective=p.objective.value(vals),
        max_violation=max(residuals.values()) if residuals else 0.0,
        residuals=residuals,
    )


def assignment_to_polygon(n: int, a: Assignment):
    """Realize the polygon: vertices evaluated and returned counterclockwise.

    The construction order v_1 .. v_n runs clockwise, so the polygon lists
    v_n, v_{n-1}, ..., v_1, starting at the origin anchor.
    """
    from . import geometry

    ve = vertex_expressions(n)
    vals = _value_map(n, a)
    pts = [
        geometry.Point2(vx.value(vals), vy.value(vals)) for vx, vy in ve.coords
    ]
    return geometry.Polygon(tuple(reversed(pts)))


# -- JSON serialization -------------------------------------------------------

def _expr_to_doc(e: QuadExpr) -> dict:
    return {
        "quadratic": [[a, b, c] for (a, b), c in sorted(e.quad.items())],
        "linear": [[v, c] for v, c in sorted(e.lin.items())],
        "constant": e.const,
    }


def _expr_from_doc(doc: dict, path: str) -> QuadExpr:
    for key in ("quadratic", "linear", "constant"):
        if key not in doc:
            raise SchemaError(f"missing field {path}.{key}")
    quad = {}
    for item in doc["quadratic"]:
        if len(item) != 3:
            raise SchemaError(f"bad triplet in {path}.quadratic: {item!r}")
        a, b, c = item
        quad[_pair(str(a), str(b))] = float(c)
    lin = {str(v): float(c) for v, c in doc["linear"]}
    return QuadExpr(quad, lin, float(doc["constant"]))


def to_json(p: QuadraticProgram) -> str:
    doc = {
        "version": JSON_VERSION,
        "n": p.n,
        "symmetric": p.symmetric,
        "relax_closing_edge": p.relax_closing_edge,
        "order_cut": p.order_cut,
        "variables": list(p.variables),
        "objective": _expr_to_doc(p.objective),
        "constraints": [
            {"kind": c.kind, "tag": c.tag, **_expr_to_doc(c.expr)} for c in p.constraints
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def from_json(text: str) -> QuadraticProgram:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    for key in ("version", "n", "symmetric", "variables", "objective", "constraints"):
        if key not in doc:
            raise SchemaError(f"missing field $.{key}")
    if doc["version"] != JSON_VERSION:
        raise SchemaError(f"unsupported version {doc['version']!r} at $.version")
    cons = []
    for idx, cd in enumerate(doc["constraints"]):
        path = f"$.constraints[{idx}]"
        for key in ("kind", "tag"):
            if key not in cd:
                raise SchemaError(f"missing field {path}.{key}")
        cons.append(QuadConstraint(_expr_from_doc(cd, path), cd["kind"], cd["tag"]))
    return QuadraticProgram(
        n=int(doc["n"]),
        variables=tuple(doc["variables"]),
        objective=_expr_from_doc(doc["objective"], "$.objective"),
        constraints=tuple(cons),
        symmetric=bool(doc["symmetric"]),
        relax_closing_edge=bool(doc.get("relax_closing_edge", False)),
        order_cut=bool(doc.get("order_cut", False)),
    )
