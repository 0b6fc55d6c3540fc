import math
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxpoly import geometry as geo
from maxpoly.formulation import Assignment, assignment_to_polygon, expand_assignment

from conftest import DECAGON_X_FULL, DECAGON_X_SYM, DODECAGON_X_SYM, OCTAGON_X

KITE = ((0.0, 0.0), (0.5, math.sqrt(3) / 2), (0.0, 1.0), (-0.5, math.sqrt(3) / 2))


def octagon_polygon():
    return assignment_to_polygon(8, Assignment(OCTAGON_X))


def decagon_polygon():
    return assignment_to_polygon(10, Assignment(DECAGON_X_FULL))


class TestAreaShoelace:
    def test_kite(self):
        assert geo.area_shoelace(geo.Polygon(KITE)) == pytest.approx(0.5, abs=1e-15)

    def test_optimal_octagon(self):
        assert geo.area_shoelace(octagon_polygon()) == pytest.approx(0.72686848, abs=1e-7)

    def test_regular_hexagon_closed_form(self):
        # oracle: (n/8) sin(2pi/n) at n=6, cross-checked by the brute shoelace
        hexagon = geo.regular_polygon(6)
        closed = 6 / 8 * math.sin(2 * math.pi / 6)
        assert closed == pytest.approx(0.64951905, abs=1e-8)
        assert geo.area_shoelace(hexagon) == pytest.approx(closed, abs=1e-14)

    def test_too_few_vertices(self):
        with pytest.raises(geo.InvalidPolygonError):
            geo.Polygon(((0.0, 0.0), (1.0, 0.0)))

    def test_consecutive_duplicates_rejected(self):
        with pytest.raises(geo.InvalidPolygonError):
            geo.Polygon(((0.0, 0.0), (0.0, 0.0), (1.0, 1.0)))


class TestDiameterSq:
    def test_degenerate_triangle(self):
        p = geo.Polygon(((0.0, 0.0), (1.0, 0.0), (0.5, 1e-9)))
        assert geo.diameter_sq(p) == pytest.approx(1.0, abs=1e-12)

    def test_optimal_decagon(self):
        assert geo.diameter_sq(decagon_polygon()) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("s", [0.25, 1.0, 3.5])
    def test_square_diagonal(self, s):
        p = geo.Polygon(((0.0, 0.0), (s, 0.0), (s, s), (0.0, s)))
        assert geo.diameter_sq(p) == pytest.approx(2 * s * s, rel=1e-14)


class TestIsConvex:
    def test_unit_square(self):
        p = geo.Polygon(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)))
        assert geo.is_convex(p)

    def test_star_quadrilateral(self):
        p = geo.Polygon(((0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)))
        assert not geo.is_convex(p)

    def test_optimal_dodecagon(self):
        p = assignment_to_polygon(12, expand_assignment(12, Assignment(DODECAGON_X_SYM)))
        assert geo.is_convex(p)

    def test_collinear_flag(self):
        p = geo.Polygon(((0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (0.5, 1.0)))
        assert not geo.is_convex(p)
        assert geo.is_convex(p, allow_collinear=True)


class TestDiameterGraph:
    def test_octagon_has_eight_edges(self):
        g = geo.diameter_graph(octagon_polygon(), tol=1e-6)
        assert g.edge_count == 8

    def test_regular_hexagon_three_diagonals(self):
        hexagon = geo.regular_polygon(6)
        # brute-force oracle: count pairs at squared distance within 1e-9 of 1
        brute = sum(
            1
            for i in range(6)
            for j in range(i + 1, 6)
            if abs(hexagon.vertices[i].dist_sq(hexagon.vertices[j]) - 1.0) <= 1e-9
        )
        g = geo.diameter_graph(hexagon, tol=1e-9)
        assert g.edge_count == brute == 3

    def test_equilateral_triangle(self):
        t = geo.Polygon(((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)))
        assert geo.diameter_graph(t, tol=1e-9).edge_count == 3

    def test_oversized_pair_rejected(self):
        p = geo.Polygon(((0.0, 0.0), (1.2, 0.0), (0.5, 0.5)))
        with pytest.raises(geo.NotSmallPolygonError):
            geo.diameter_graph(p, tol=1e-6)


class TestGrahamConfiguration:
    def test_optimal_octagon(self):
        g = geo.diameter_graph(octagon_polygon(), tol=1e-6)
        assert geo.check_graham_configuration(g)

    def test_optimal_decagon(self):
        g = geo.diameter_graph(decagon_polygon(), tol=1e-6)
        assert geo.check_graham_configuration(g)

    def test_missing_pendant_edge(self):
        g = geo.diameter_graph(octagon_polygon(), tol=1e-6)
        pend = next(e for e in g.edges if 4 in e and 8 in e)
        broken = geo.DiameterGraph(g.n, g.edges - {pend}, g.tol)
        assert not geo.check_graham_configuration(broken)

    def test_edge_count_mismatch_fails(self):
        hexagon = geo.regular_polygon(6)
        g = geo.diameter_graph(hexagon, tol=1e-9)
        assert g.edge_count != 6
        assert not geo.check_graham_configuration(g)


class TestClosedForms:
    def test_regular_small_area_values(self):
        assert geo.regular_small_area(6) == pytest.approx(0.64951905, abs=1e-8)
        assert geo.regular_small_area(8) == pytest.approx(0.70710678, abs=1e-8)
        assert geo.regular_small_area(4) == pytest.approx(0.5, abs=1e-15)

    def test_upper_bound_values(self):
        assert geo.upper_bound_area(14) == pytest.approx(0.76893595, abs=1e-8)
        assert geo.upper_bound_area(16) == pytest.approx(0.77279135, abs=1e-8)
        # 30-digit evaluation of the same expression: 0.753162770252...
        assert geo.upper_bound_area(10) == pytest.approx(0.75316277, abs=1e-8)
        assert geo.upper_bound_area(10) > 0.74913736

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            geo.regular_small_area(2)
        with pytest.raises(ValueError):
            geo.upper_bound_area(1)

    @pytest.mark.parametrize("n", range(3, 26))
    def test_odd_equals_bound_even_below(self, n):
        if n % 2 == 1:
            assert geo.regular_small_area(n) == geo.upper_bound_area(n)
        else:
            assert geo.regular_small_area(n) < geo.upper_bound_area(n)


class TestRenderSvg:
    @staticmethod
    def counts(svg: str) -> tuple[int, int, int]:
        root = ET.fromstring(svg)
        ns = "{http://www.w3.org/2000/svg}"
        return (
            len(root.findall(f"{ns}circle")),
            len(root.findall(f"{ns}line")),
            len(root.findall(f"{ns}polygon")),
        )

    def test_decagon_with_graph(self):
        p = decagon_polygon()
        g = geo.diameter_graph(p, tol=1e-6)
        circles, lines, outlines = self.counts(geo.render_svg(p, g))
        assert circles == 10 and lines == 10 and outlines == 1

    def test_polygon_only_has_no_chords(self):
        _, lines, _ = self.counts(geo.render_svg(decagon_polygon()))
        assert lines == 0

    def test_dodecagon_vertex_markers(self):
        p = assignment_to_polygon(12, expand_assignment(12, Assignment(DODECAGON_X_SYM)))
        circles, _, _ = self.counts(geo.render_svg(p))
        assert circles == 12


class TestPolygonJson:
    def test_round_trip(self):
        p = decagon_polygon()
        q = geo.polygon_from_json(geo.polygon_to_json(p))
        assert q == p

    def test_declared_n_checked(self):
        with pytest.raises(geo.InvalidPolygonError):
            geo.polygon_from_json('{"n": 5, "vertices": [[0,0],[1,0],[0,1]]}')


# -- invariants ----------------------------------------------------------------

points_strategy = st.lists(
    st.tuples(
        st.floats(-2, 2, allow_nan=False).map(lambda v: round(v, 6)),
        st.floats(-2, 2, allow_nan=False).map(lambda v: round(v, 6)),
    ),
    min_size=3,
    max_size=9,
    unique=True,
)


def _valid_polygon(pts):
    try:
        return geo.Polygon(tuple(pts))
    except geo.InvalidPolygonError:
        return None


@settings(max_examples=200, deadline=None)
@given(points_strategy, st.integers(0, 8))
def test_area_invariant_under_rotation(pts, k):
    p = _valid_polygon(pts)
    if p is None:
        return
    rotated = geo.Polygon(p.vertices[k % p.n :] + p.vertices[: k % p.n])
    assert geo.area_shoelace(rotated) == pytest.approx(
        geo.area_shoelace(p), abs=1e-12
    )


@settings(max_examples=200, deadline=None)
@given(points_strategy)
def test_area_negates_under_reversal(pts):
    p = _valid_polygon(pts)
    if p is None:
        return
    rev = geo.Polygon(tuple(reversed(p.vertices)))
    assert geo.area_shoelace(rev) == pytest.approx(-geo.area_shoelace(p), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(points_strategy, st.floats(0.01, 100.0, allow_nan=False))
def test_scaling_quadratic(pts, s):
    p = _valid_polygon(pts)
    if p is None:
        return
    scaled = geo.Polygon(tuple(geo.Point2(v.x * s, v.y * s) for v in p.vertices))
    # relative 1e-12, with an absolute cushion sized to the polygon for the
    # exactly-zero-area degenerate cases
    cushion = 1e-12 * s * s * max(1.0, geo.diameter_sq(p))
    assert geo.area_shoelace(scaled) == pytest.approx(
        s * s * geo.area_shoelace(p), rel=1e-12, abs=cushion
    )
    assert geo.diameter_sq(scaled) == pytest.approx(
        s * s * geo.diameter_sq(p), rel=1e-12
    )


def test_small_polygon_area_below_upper_bound():
    # angularly sorted points in a radius-1/2 disk: diameter <= 1
    import numpy as np

    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(3, 12))
        r = 0.5 * np.sqrt(rng.random(n))
        t = np.sort(rng.random(n) * 2 * np.pi)
        pts = tuple((float(ri * np.cos(ti)), float(ri * np.sin(ti))) for ri, ti in zip(r, t))
        try:
            p = geo.Polygon(pts)
        except geo.InvalidPolygonError:
            continue
        assert geo.diameter_sq(p) <= 1.0
        assert abs(geo.area_shoelace(p)) <= geo.upper_bound_area(p.n) + 1e-12


def test_oriented_constructor_flips_clockwise():
    cw = tuple(reversed(KITE))
    p = geo.Polygon.oriented(cw)
    assert p.reoriented
    assert geo.area_shoelace(p) > 0
    q = geo.Polygon.oriented(KITE)
    assert not q.reoriented
