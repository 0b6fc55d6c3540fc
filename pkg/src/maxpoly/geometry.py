"""Planar primitives for unit-diameter polygon work.

Vertices live at the unit-diameter scale: a valid "small polygon" is convex
with largest vertex-pair distance equal to 1.  The module provides exact-ish
plumbing (shoelace area, squared diameter, convexity), extraction and
validation of the diameter graph (the cycle-plus-pendant-edge structure that
optimal even n-gons are known to have), closed-form baselines and upper
bounds for the optimal area, and SVG rendering.

All functions are pure; `Polygon` and `DiameterGraph` are immutable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = [
    "Point2",
    "Polygon",
    "DiameterGraph",
    "InvalidPolygonError",
    "NotSmallPolygonError",
    "area_shoelace",
    "diameter_sq",
    "is_convex",
    "diameter_graph",
    "check_graham_configuration",
    "regular_small_area",
    "upper_bound_area",
    "render_svg",
    "polygon_to_json",
    "polygon_from_json",
    "regular_polygon",
]

DEFAULT_GRAPH_TOL = 1e-6
COLLINEAR_TOL = 1e-12


class InvalidPolygonError(ValueError):
    """Vertex list does not describe a usable polygon."""


class NotSmallPolygonError(ValueError):
    """Some vertex pair is further apart than the unit-diameter tolerance."""


@dataclass(frozen=True)
class Point2:
    """Point in the plane at unit-diameter scale."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidPolygonError(f"non-finite coordinate ({self.x}, {self.y})")

    def dist_sq(self, other: "Point2") -> float:
        dx = self.x - other.x
        dy = self.y - other.y
        return dx * dx + dy * dy


@dataclass(frozen=True)
class Polygon:
    """Ordered planar vertices; counterclockwise is the canonical orientation.

    The constructor keeps the given order.  `Polygon.oriented` reorders
    clockwise input to counterclockwise and records that it did so in
    `reoriented`.
    """

    vertices: tuple[Point2, ...]
    reoriented: bool = field(default=False, compare=False)

    def __post_init__(self):
        verts = tuple(
            v if isinstance(v, Point2) else Point2(float(v[0]), float(v[1]))
            for v in self.vertices
        )
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise InvalidPolygonError(f"need at least 3 vertices, got {len(verts)}")
        for a, b in zip(verts, verts[1:] + verts[:1]):
            if a.x == b.x and a.y == b.y:
                raise InvalidPolygonError("consecutive vertices coincide")

    @classmethod
    def oriented(cls, vertices) -> "Polygon":
        """Build a polygon, flipping clockwise input to counterclockwise."""
        p = cls(tuple(vertices))
        if area_shoelace(p) < 0:
            return cls(tuple(reversed(p.vertices)), reoriented=True)
        return p

    @property
    def n(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class DiameterGraph:
    """Unit-distance edge structure of a polygon's vertex set.

    Every edge joins a vertex pair whose distance is within `tol` of 1
    (compared on squared distances), and no pair exceeds 1 + tol.
    """

    n: int
    edges: frozenset[frozenset[int]]
    tol: float

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)


def area_shoelace(p: Polygon) -> float:
    """Signed shoelace area: positive for counterclockwise vertex order."""
    verts = p.vertices
    s = 0.0
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        s += a.x * b.y - b.x * a.y
    return 0.5 * s


def diameter_sq(p: Polygon) -> float:
    """Maximum squared distance over all vertex pairs."""
    verts = p.vertices
    best = 0.0
    for i, a in enumerate(verts):
        for b in verts[i + 1 :]:
            d = a.dist_sq(b)
            if d > best:
                best = d
    return best


def is_convex(p: Polygon, allow_collinear: bool = False) -> bool:
    """True iff consecutive-edge cross products all share one sign.

    Cross products with magnitude <= 1e-12 count as collinear and are
    accepted only when `allow_collinear` is set.
    """
    verts = p.vertices
    m = len(verts)
    sign = 0
    for i in range(m):
        a, b, c = verts[i], verts[(i + 1) % m], verts[(i + 2) % m]
        cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x)
        if abs(cross) <= COLLINEAR_TOL:
            if not allow_collinear:
                return False
            continue
        s = 1 if cross > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def diameter_graph(p: Polygon, tol: float = DEFAULT_GRAPH_TOL) -> DiameterGraph:
    """Extract the unit-distance graph: edges where |dist^2 - 1| <= tol.

    Raises NotSmallPolygonError when any pair exceeds squared distance
    1 + tol (the polygon is not small at this tolerance).
    """
    verts = p.vertices
    edges = set()
    for i, a in enumerate(verts):
        for j in range(i + 1, len(verts)):
            d = a.dist_sq(verts[j])
            if d > 1.0 + tol:
                raise NotSmallPolygonError(
                    f"vertex pair ({i + 1},{j + 1}) at squared distance {d:.12f} > 1 + {tol:g}"
                )
            if abs(d - 1.0) <= tol:
                edges.add(frozenset((i + 1, j + 1)))
    return DiameterGraph(n=len(verts), edges=frozenset(edges), tol=tol)


def check_graham_configuration(g: DiameterGraph) -> bool:
    """True iff the edges form an (n-1)-cycle plus one pendant edge.

    The pendant edge attaches the one remaining vertex to some cycle
    vertex, so the graph has exactly n edges, one degree-1 vertex, one
    degree-3 vertex and degree 2 everywhere else.
    """
    n = g.n
    if len(g.edges) != n:
        return False
    degree = {i: 0 for i in range(1, n + 1)}
    adj: dict[int, list[int]] = {i: [] for i in range(1, n + 1)}
    for e in g.edges:
        a, b = tuple(e)
        degree[a] += 1
        degree[b] += 1
        adj[a].append(b)
        adj[b].append(a)
    pendant = [v for v, d in degree.items() if d == 1]
    if len(pendant) != 1:
        return False
    tip = pendant[0]
    anchor = adj[tip][0]
    # dropping the pendant edge must leave a single cycle through every
    # vertex except the tip
    cyc_adj = {v: [w for w in adj[v] if w != tip] for v in adj if v != tip}
    if any(len(ws) != 2 for ws in cyc_adj.values()):
        return False
    prev: int | None = None
    cur = anchor
    seen = set()
    for _ in range(n - 1):
        seen.add(cur)
        a, b = cyc_adj[cur]
        nxt = b if a == prev else a
        prev, cur = cur, nxt
    return cur == anchor and len(seen) == n - 1


def regular_small_area(n: int) -> float:
    """Area of the regular n-gon scaled to unit diameter.

    Odd n: diameter joins a vertex to an opposite edge midpoint region,
    giving (n/8) sin(2pi/n) / cos^2(pi/2n).  Even n: diameter is the long
    diagonal, giving (n/8) sin(2pi/n).  The regular polygon is the true
    optimum for odd n only.
    """
    if n < 3:
        raise ValueError(f"polygon needs n >= 3, got {n}")
    if n % 2 == 1:
        return n / 8.0 * math.sin(2 * math.pi / n) / math.cos(math.pi / (2 * n)) ** 2
    return n / 8.0 * math.sin(2 * math.pi / n)


def upper_bound_area(n: int) -> float:
    """Analytic upper bound on the area of any small n-gon.

    Uses (n/8) sin(2pi/n) / cos^2(pi/2n), the regular-polygon value at odd
    n, which strictly exceeds the even-n optimum.  A typographically
    garbled variant of this bound, sin^2(pi/2n) cot(pi/n), circulates in
    print; it evaluates far below known optimal areas (0.055 at n=14) and
    is not what the accompanying numeric brackets use.
    """
    if n < 3:
        raise ValueError(f"polygon needs n >= 3, got {n}")
    return n / 8.0 * math.sin(2 * math.pi / n) / math.cos(math.pi / (2 * n)) ** 2


def regular_polygon(n: int) -> Polygon:
    """Regular n-gon scaled to unit diameter, counterclockwise."""
    if n < 3:
        raise ValueError(f"polygon needs n >= 3, got {n}")
    if n % 2 == 1:
        r = 1.0 / (2.0 * math.cos(math.pi / (2 * n)))
    else:
        r = 0.5
    pts = []
    for k in range(n):
        t = 2 * math.pi * k / n
        pts.append(Point2(r * math.cos(t), r * math.sin(t)))
    return Polygon(tuple(pts))


def polygon_to_json(p: Polygon) -> str:
    """Serialize as {"n": int, "vertices": [[x, y], ...]}."""
    doc = {"n": p.n, "vertices": [[v.x, v.y] for v in p.vertices]}
    return json.dumps(doc)


def polygon_from_json(text: str) -> Polygon:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise InvalidPolygonError("polygon JSON must carry a 'vertices' list")
    verts = tuple(Point2(float(x), float(y)) for x, y in doc["vertices"])
    p = Polygon(verts)
    if "n" in doc and doc["n"] != p.n:
        raise InvalidPolygonError(f"declared n={doc['n']} but {p.n} vertices given")
    return p


def render_svg(p: Polygon, g: DiameterGraph | None = None) -> str:
    """Standalone SVG: polygon outline, vertex dots, diameter-graph chords.

    512x512 canvas, y axis flipped, viewbox fitted with a 5% margin.
    """
    verts = p.vertices
    xs = [v.x for v in verts]
    ys = [v.y for v in verts]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    margin = 0.05 * span
    lo_x, lo_y = min(xs) - margin, min(ys) - margin
    size = span + 2 * margin
    scale = 512.0 / size

    def sx(x: float) -> float:
        return (x - lo_x) * scale

    def sy(y: float) -> float:
        return 512.0 - (y - lo_y) * scale  # flipped

    pts_attr = " ".join(f"{sx(v.x):.3f},{sy(v.y):.3f}" for v in verts)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" width="512" height="512" '
        'viewBox="0 0 512 512">',
        f'<polygon points="{pts_attr}" fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    if g is not None:
        for a, b in g.edge_list():
            va, vb = verts[a - 1], verts[b - 1]
            lines.append(
                f'<line x1="{sx(va.x):.3f}" y1="{sy(va.y):.3f}" '
                f'x2="{sx(vb.x):.3f}" y2="{sy(vb.y):.3f}" '
                'stroke="gray" stroke-width="0.7" stroke-dasharray="4 3"/>'
            )
    for v in verts:
        lines.append(f'<circle cx="{sx(v.x):.3f}" cy="{sy(v.y):.3f}" r="3.5" fill="black"/>')
    lines.append("</svg>")
    return "\n".join(lines)
