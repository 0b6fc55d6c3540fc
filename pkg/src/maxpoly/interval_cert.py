"""Rigorous interval certification of candidate polygons.

A floating-point solver answer describes an exact polygon: the x values
are binary floats, the y values are the real numbers sqrt(1 - x^2).  This
module encloses that polygon's vertices in directed-rounded intervals and
derives three verified facts: convexity (interval cross products strictly
positive), an area enclosure, and a squared-diameter enclosure.  Scaling
the polygon by 1/sqrt(max(1, diameter_sq.hi)) yields a true unit-diameter
convex n-gon, so

    area.lo / max(1, diameter_sq.hi)     (rounded down)

is a certified lower bound on the optimal area for that n.

Directed rounding is portable: no FPU mode switching.  Each primitive
computes the rounding error of the nearest-rounded result exactly (TwoSum
for +/-, Dekker's product splitting for *) and widens a bound by one ulp
only when that bound lies on the wrong side, so exact operations stay
exact and nothing is ever tighter than the true value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .formulation import Assignment, vertex_expressions
from .geometry import upper_bound_area

__all__ = [
    "Interval",
    "Certificate",
    "CertificationError",
    "enclose_polygon",
    "certify",
    "certify_points",
    "bracket",
    "certificate_to_json",
]

CERT_VERSION = "maxpoly-cert/1"

_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant
_INF = math.inf


class CertificationError(RuntimeError):
    """Certification could not establish the claimed property."""


def _two_sum(a: float, b: float) -> tuple[float, float]:
    """s = fl(a + b) and exact err with a + b = s + err."""
    s = a + b
    bv = s - a
    err = (a - (s - bv)) + (b - bv)
    return s, err


def _split(a: float) -> tuple[float, float]:
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    """p = fl(a * b) and exact err with a * b = p + err (no overflow regime)."""
    p = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _down(value: float, err: float) -> float:
    """Lower bound: drop one ulp iff the rounded value exceeds the truth."""
    return math.nextafter(value, -_INF) if err < 0.0 else value


def _up(value: float, err: float) -> float:
    return math.nextafter(value, _INF) if err > 0.0 else value


def _add_down(a: float, b: float) -> float:
    return _down(*_two_sum(a, b))


def _add_up(a: float, b: float) -> float:
    return _up(*_two_sum(a, b))


def _mul_down(a: float, b: float) -> float:
    return _down(*_two_prod(a, b))


def _mul_up(a: float, b: float) -> float:
    return _up(*_two_prod(a, b))


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with outward-rounded arithmetic."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"non-finite interval bound [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v: float) -> "Interval":
        return cls(v, v)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, v: float) -> bool:
        return self.lo <= v <= self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_add_down(self.lo, other.lo), _add_up(self.hi, other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_add_down(self.lo, -other.hi), _add_up(self.hi, -other.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        pairs = (
            (self.lo, other.lo),
            (self.lo, other.hi),
            (self.hi, other.lo),
            (self.hi, other.hi),
        )
        return Interval(
            min(_mul_down(a, b) for a, b in pairs),
            max(_mul_up(a, b) for a, b in pairs),
        )

    def square(self) -> "Interval":
        if self.lo >= 0.0:
            return Interval(_mul_down(self.lo, self.lo), _mul_up(self.hi, self.hi))
        if self.hi <= 0.0:
            return Interval(_mul_down(self.hi, self.hi), _mul_up(self.lo, self.lo))
        return Interval(0.0, max(_mul_up(self.lo, self.lo), _mul_up(self.hi, self.hi)))

    def sqrt(self) -> "Interval":
        """Square root; a slightly negative lo (enclosure noise) clamps to 0."""
        if self.hi < 0.0:
            raise ValueError(f"sqrt of negative interval [{self.lo}, {self.hi}]")
        lo = max(self.lo, 0.0)
        s_lo = math.sqrt(lo)
        p, e = _two_prod(s_lo, s_lo)
        if p > lo or (p == lo and e > 0.0):
            s_lo = math.nextafter(s_lo, -_INF)
        s_hi = math.sqrt(self.hi)
        p, e = _two_prod(s_hi, s_hi)
        if p < self.hi or (p == self.hi and e < 0.0):
            s_hi = math.nextafter(s_hi, _INF)
        return Interval(max(s_lo, 0.0), s_hi)


def _div_down(a: float, b: float) -> float:
    """Round-down a / b for b > 0."""
    q = a / b
    p, e = _two_prod(q, b)
    if p > a or (p == a and e > 0.0):
        return math.nextafter(q, -_INF)
    return q


def enclose_polygon(n: int, a: Assignment) -> list[tuple[Interval, Interval]]:
    """Vertex enclosures, in the counterclockwise polygon vertex order.

    y values are enclosed as sqrt([1,1] - x^2) when not given explicitly;
    x values above 1 make that square root undefined and raise.  The i-th
    pair encloses vertex i of `assignment_to_polygon(n, a)`.
    """
    m = n - 3
    if len(a.x) == (n - 2) // 2 and len(a.x) != m:
        from .formulation import expand_assignment

        a = expand_assignment(n, a)
    if len(a.x) != m:
        raise ValueError(f"need {m} x values for n={n}, got {len(a.x)}")
    xiv = [Interval.point(v) for v in a.x]
    if a.y is not None:
        yiv = [Interval.point(v) for v in a.y]
    else:
        one = Interval.point(1.0)
        yiv = []
        for i, xi in enumerate(xiv):
            t = one - xi.square()
            if t.hi < 0.0:
                raise ValueError(f"x{i + 1}={a.x[i]} exceeds 1; no real y")
            yiv.append(t.sqrt())
    ve = vertex_expressions(n)
    out = []
    for vx, vy in ve.coords:
        cx = Interval.point(vx.const)
        for var, coef in sorted(vx.coeffs.items()):
            term = xiv[int(var[1:]) - 1]
            cx = cx + (term if coef > 0 else -term)
        cy = Interval.point(vy.const)
        for var, coef in sorted(vy.coeffs.items()):
            term = yiv[int(var[1:]) - 1]
            cy = cy + (term if coef > 0 else -term)
        out.append((cx, cy))
    out.reverse()  # construction order is clockwise; polygon order is ccw
    return out


@dataclass(frozen=True)
class Certificate:
    """Verified enclosures and the certified lower bound for one candidate."""

    n: int
    area: Interval
    diameter_sq: Interval
    convex_verified: bool
    certified_lower_bound: float | None
    assignment: Assignment | None = None

    def require_bound(self) -> float:
        if self.certified_lower_bound is None:
            raise CertificationError(
                "candidate not certified (convexity or positivity failed)"
            )
        return self.certified_lower_bound


def _certify_boxes(
    n: int,
    boxes: list[tuple[Interval, Interval]],
    assignment: Assignment | None,
) -> Certificate:
    m = len(boxes)
    convex = True
    for i in range(m):
        ax, ay = boxes[i]
        bx, by = boxes[(i + 1) % m]
        cx, cy = boxes[(i + 2) % m]
        e1x, e1y = bx - ax, by - ay
        e2x, e2y = cx - bx, cy - by
        cross = e1x * e2y - e1y * e2x
        if not cross.lo > 0.0:
            convex = False
            break

    twice = Interval.point(0.0)
    for i in range(m):
        ax, ay = boxes[i]
        bx, by = boxes[(i + 1) % m]
        twice = twice + (ax * by - bx * ay)
    area = twice * Interval.point(0.5)

    d_lo, d_hi = -_INF, -_INF
    for i in range(m):
        for j in range(i + 1, m):
            dx = boxes[i][0] - boxes[j][0]
            dy = boxes[i][1] - boxes[j][1]
            d2 = dx.square() + dy.square()
            d_lo = max(d_lo, d2.lo)
            d_hi = max(d_hi, d2.hi)
    diam = Interval(d_lo, d_hi)

    bound = None
    if convex and area.lo > 0.0:
        bound = _div_down(area.lo, max(1.0, diam.hi))
    return Certificate(
        n=n,
        area=area,
        diameter_sq=diam,
        convex_verified=convex,
        certified_lower_bound=bound,
        assignment=assignment,
    )


def certify(n: int, a: Assignment) -> Certificate:
    """Certify the polygon realized by an assignment.

    The lower bound holds for the optimal small n-gon area because the
    candidate, rescaled by 1/sqrt(max(1, diameter_sq.hi)), is itself a
    convex n-gon of diameter at most 1.  Failure to verify convexity
    yields a certificate with `convex_verified` false and no bound.
    """
    return _certify_boxes(n, enclose_polygon(n, a), a)


def certify_points(points) -> Certificate:
    """Certify an explicit counterclockwise vertex list (floats or Intervals)."""
    boxes = []
    for px, py in points:
        boxes.append(
            (
                px if isinstance(px, Interval) else Interval.point(float(px)),
                py if isinstance(py, Interval) else Interval.point(float(py)),
            )
        )
    return _certify_boxes(len(boxes), boxes, None)


def bracket(n: int, a: Assignment) -> tuple[float, float]:
    """(certified lower bound, analytic upper bound) for the optimal area."""
    cert = certify(n, a)
    lower = cert.require_bound()
    upper = upper_bound_area(n)
    if lower > upper:
        raise CertificationError(
            f"certified lower bound {lower} exceeds analytic upper bound {upper}"
        )
    return lower, upper


def _interval_doc(iv: Interval) -> dict:
    return {
        "lo": iv.lo,
        "hi": iv.hi,
        "lo_hex": iv.lo.hex(),
        "hi_hex": iv.hi.hex(),
    }


def certificate_to_json(cert: Certificate) -> str:
    doc = {
        "version": CERT_VERSION,
        "n": cert.n,
        "convex_verified": cert.convex_verified,
        "certified_lower_bound": cert.certified_lower_bound,
        "certified_lower_bound_hex": (
            cert.certified_lower_bound.hex()
            if cert.certified_lower_bound is not None
            else None
        ),
        "area": _interval_doc(cert.area),
        "diameter_sq": _interval_doc(cert.diameter_sq),
        "x": list(cert.assignment.x) if cert.assignment is not None else None,
        "y": (
            list(cert.assignment.y)
            if cert.assignment is not None and cert.assignment.y is not None
            else None
        ),
    }
    return json.dumps(doc, indent=1, sort_keys=True)
