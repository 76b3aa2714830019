"""Confocal conics in focal form: membership, normals, arcs and ray crossings."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from invisible_body.core.conics import (
    ConicArc,
    ConicKind,
    arc_length,
    confocal_crossing,
    conic_through,
    focal_residual,
    normal_at,
    polar_point,
    ray_conic_hits,
    ray_conic_intersections,
)
from invisible_body.core.errors import DegenerateConic, OffCurve, OutOfExtent
from invisible_body.core.geometry import Dir2, Point2, Ray2

F1 = Point2(-1.0, 0.0)
F2 = Point2(1.0, 0.0)


@pytest.fixture
def ellipse():
    # a = 2, b = sqrt(3)
    return conic_through(ConicKind.ELLIPSE, F1, F2, Point2(2.0, 0.0))


@pytest.fixture
def branch():
    # branch around F2 through (0.5, 0): k = 1
    return conic_through(ConicKind.HYPERBOLA_BRANCH, F1, F2, Point2(0.5, 0.0), F2)


class TestConstruction:
    def test_focal_constants(self, ellipse, branch):
        assert ellipse.k == pytest.approx(4.0)
        assert branch.k == pytest.approx(1.0)

    def test_point_between_foci_is_degenerate(self):
        with pytest.raises(DegenerateConic):
            conic_through(ConicKind.ELLIPSE, F1, F2, Point2(0.2, 0.0))

    def test_point_on_focus_is_degenerate(self):
        with pytest.raises(DegenerateConic):
            conic_through(ConicKind.ELLIPSE, F1, F2, F2)

    def test_bisector_point_has_no_branch(self):
        with pytest.raises(DegenerateConic):
            conic_through(ConicKind.HYPERBOLA_BRANCH, F1, F2, Point2(0.0, 1.0), F2)

    def test_other_branch_is_off_curve(self, branch):
        assert focal_residual(branch, Point2(-0.5, 0.0)) == math.inf


class TestNormals:
    def test_ellipse_normal_points_outward(self, ellipse):
        n = normal_at(ellipse, Point2(2.0, 0.0))
        assert n.distance(Point2(1.0, 0.0)) < 1e-12

    def test_branch_normal_points_away_from_its_focus(self, branch):
        n = normal_at(branch, Point2(0.5, 0.0))
        assert n.distance(Point2(-1.0, 0.0)) < 1e-12

    def test_off_curve(self, ellipse):
        with pytest.raises(OffCurve):
            normal_at(ellipse, Point2(0.0, 0.0))

    @given(st.floats(min_value=-math.pi, max_value=math.pi))
    @settings(max_examples=100)
    def test_focal_reflection(self, theta):
        # a ray from one focus reflects through the other
        conic = conic_through(ConicKind.ELLIPSE, F1, F2, Point2(2.0, 0.0))
        p = polar_point(conic, F1, theta)
        n = normal_at(conic, p)
        d = Dir2.between(F1, p)
        r = d - n * (2.0 * d.dot(n))
        to_f2 = Dir2.between(p, F2)
        assert abs(r.cross(to_f2)) < 1e-9
        assert r.dot(to_f2) > 0.0


class TestPolarForm:
    @given(st.floats(min_value=-math.pi, max_value=math.pi))
    @settings(max_examples=200)
    def test_ellipse_points_lie_on_the_curve(self, theta):
        conic = conic_through(ConicKind.ELLIPSE, F1, F2, Point2(0.3, 1.7))
        for pivot in (F1, F2):
            p = polar_point(conic, pivot, theta)
            assert focal_residual(conic, p) < 1e-12

    @given(st.floats(min_value=-0.9, max_value=0.9))
    @settings(max_examples=200)
    def test_branch_points_lie_on_the_curve(self, s):
        conic = conic_through(ConicKind.HYPERBOLA_BRANCH, F1, F2, Point2(0.5, 0.0), F2)
        p = polar_point(conic, F2, math.pi + s)
        assert p is not None
        assert focal_residual(conic, p) < 1e-12

    def test_branch_misses_away_from_the_far_focus(self, branch):
        # directions from the near focus pointing away from the curve
        assert polar_point(branch, F2, 0.0) is None


class TestArcs:
    def test_between_and_sample(self, ellipse):
        arc = ConicArc.between(ellipse, F2, Point2(2.0, 0.0), Point2(1.0, 1.5))
        pts = arc.sample(10)
        assert len(pts) == 11
        assert pts[0].distance(Point2(2.0, 0.0)) < 1e-12
        assert pts[-1].distance(Point2(1.0, 1.5)) < 1e-12
        assert arc.contains(Point2(1.0, 1.5))
        assert not arc.contains(Point2(-2.0, 0.0))

    def test_extent_must_reach_the_curve(self, branch):
        with pytest.raises(OutOfExtent):
            ConicArc(branch, F2, -0.5, 0.5)

    def test_point_at_inside_the_extent(self, ellipse):
        arc = ConicArc(ellipse, F2, 0.2, 1.2)
        r = 3.0 / (2.0 + math.cos(0.7))
        p = arc.point_at(0.7)
        assert p.distance(Point2(1.0 + r * math.cos(0.7), r * math.sin(0.7))) < 1e-12
        assert arc.point_at(0.7 + 2.0 * math.pi).distance(p) < 1e-12
        assert arc.point_at(1.2).distance(arc.end) < 1e-12

    def test_point_at_the_vertices(self, ellipse):
        arc = ConicArc(ellipse, F2, 0.0, math.pi)
        assert arc.point_at(0.0).distance(Point2(2.0, 0.0)) < 1e-12
        assert arc.point_at(math.pi).distance(Point2(-2.0, 0.0)) < 1e-12

    @pytest.mark.parametrize("theta", [0.1, 1.3, 1.2 + 1e-6, math.pi])
    def test_point_at_outside_the_extent(self, ellipse, theta):
        arc = ConicArc(ellipse, F2, 0.2, 1.2)
        with pytest.raises(OutOfExtent):
            arc.point_at(theta)

    def test_length_matches_dense_polyline(self, ellipse):
        arc = ConicArc(ellipse, F2, 0.0, math.pi)
        pts = np.array([p.as_tuple() for p in arc.sample(20000)])
        polyline = float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
        assert arc_length(arc) == pytest.approx(polyline, abs=1e-6)

    def test_with_conic_keeps_extent(self, ellipse):
        arc = ConicArc(ellipse, F2, 0.2, 1.2)
        wider = arc.with_conic(ellipse.with_constant(ellipse.k * 1.01))
        assert (wider.theta_min, wider.theta_max) == (arc.theta_min, arc.theta_max)
        assert focal_residual(wider.conic, wider.midpoint) < 1e-12


class TestRayCrossings:
    def test_ray_from_center(self, ellipse):
        hits = ray_conic_intersections(Ray2(Point2(0.0, 0.0), Dir2(1.0, 0.0)), ellipse)
        assert len(hits) == 1
        assert hits[0][0] == pytest.approx(2.0)

    def test_ray_from_outside_hits_twice(self, ellipse):
        hits = ray_conic_intersections(Ray2(Point2(-5.0, 0.0), Dir2(1.0, 0.0)), ellipse)
        assert [t for t, _ in hits] == pytest.approx([3.0, 7.0])

    def test_miss(self, ellipse):
        assert ray_conic_intersections(Ray2(Point2(0.0, 5.0), Dir2(1.0, 0.0)), ellipse) == []

    def test_hits_restricted_to_the_arc(self, ellipse):
        upper = ConicArc(ellipse, F2, 0.1, math.pi - 0.1)
        ray = Ray2(Point2(0.0, 0.0), Dir2(0.0, -1.0))
        assert ray_conic_hits(ray, upper) == []
        assert len(ray_conic_hits(Ray2(Point2(0.0, 0.0), Dir2(0.0, 1.0)), upper)) == 1

    @given(st.floats(min_value=0.05, max_value=math.pi - 0.05))
    @settings(max_examples=100)
    def test_hits_lie_on_the_curve(self, theta):
        conic = conic_through(ConicKind.HYPERBOLA_BRANCH, F1, F2, Point2(0.5, 0.0), F2)
        hits = ray_conic_intersections(Ray2(Point2(3.0, 0.5), Dir2.from_angle(math.pi - theta)), conic)
        for _, p in hits:
            assert focal_residual(conic, p) < conic.tolerance


class TestConfocalCrossing:
    def test_crossing_is_orthogonal(self, ellipse, branch):
        u = confocal_crossing(ellipse, branch, Point2(0.0, 1.0))
        assert u.y > 0.0
        assert focal_residual(ellipse, u) < 1e-12
        assert focal_residual(branch, u) < 1e-12
        assert abs(normal_at(ellipse, u).dot(normal_at(branch, u))) < 1e-9

    def test_side_selects_half_plane(self, ellipse, branch):
        assert confocal_crossing(ellipse, branch, Point2(0.0, -1.0)).y < 0.0
