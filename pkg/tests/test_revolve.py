import io
import math

import numpy as np
import pytest

from invisible_body.core.conics import focal_residual
from invisible_body.core.const import TAU
from invisible_body.core.errors import DomainError, OutsideRevolvedRange
from invisible_body.core.geometry import Dir2, Point2, Ray2
from invisible_body.models.construction import PieceKind, Source
from invisible_body.models.revolve import Body3D, Point3, Ray3
from invisible_body.models.trace import TraceStatus
from invisible_body.services.billiard import trace
from invisible_body.services.revolve import (
    exit_deviation3,
    lift,
    meridian_reduce,
    revolution_steps,
    revolve_mesh,
    revolved_sweep,
    rotation_matrices,
    trace3d,
    write_obj,
)

A2_3D = Point3(1.0, 0.0, 0.0)


def ray3(degrees: float, meridian: float) -> Ray3:
    return Ray3(A2_3D, lift(Dir2.from_angle(math.radians(degrees)), meridian).unit())


def rotate(p: Point3, theta: float) -> Point3:
    c, s = math.cos(theta), math.sin(theta)
    return Point3(p.x, c * p.y - s * p.z, s * p.y + c * p.z)


@pytest.fixture(scope="module")
def solid(body):
    return Body3D(body)


class TestBody3D:
    @pytest.mark.parametrize("angular_range", [(1.0, 0.5), (-0.1, 1.0), (0.0, 7.0)])
    def test_range_is_checked(self, small_body, angular_range):
        with pytest.raises(DomainError):
            Body3D(small_body, angular_range)

    def test_full_turn(self, small_body):
        assert Body3D(small_body).full_turn
        assert not Body3D(small_body, (0.0, math.pi)).full_turn

    def test_rotation_matrices_match_lift(self):
        thetas = np.array([0.0, 0.3, 2.0])
        rotations = rotation_matrices(thetas)
        p = Point2(0.4, 1.7)
        for theta, r in zip(thetas, rotations):
            expected = lift(p, float(theta)).as_tuple()
            assert r @ np.array([p.x, p.y, 0.0]) == pytest.approx(expected, abs=1e-15)


class TestMeridianReduction:
    @pytest.mark.parametrize("meridian", [0.0, 0.9, 3.0, 5.5])
    def test_reduce_then_lift(self, solid, meridian):
        ray = ray3(133.0, meridian)
        planar, theta = meridian_reduce(ray, solid)
        assert theta == pytest.approx(meridian, abs=1e-12)
        assert planar.origin == Point2(1.0, 0.0)
        assert planar.dir.angle == pytest.approx(math.radians(133.0), abs=1e-12)
        back = lift(planar.dir, theta)
        assert back.distance(ray.dir) < 1e-12

    def test_rays_must_leave_a_source(self, solid):
        with pytest.raises(DomainError):
            meridian_reduce(Ray3(Point3(0.0, 0.0, 0.0), Point3(0.0, 1.0, 0.0)), solid)
        with pytest.raises(DomainError):
            meridian_reduce(Ray3(Point3(1.0, 0.1, 0.0), Point3(0.0, 1.0, 0.0)), solid)

    def test_partial_range(self, body):
        half = Body3D(body, (0.0, math.pi / 2.0))
        assert meridian_reduce(ray3(133.0, 1.0), half)[1] == pytest.approx(1.0)
        with pytest.raises(OutsideRevolvedRange):
            meridian_reduce(ray3(133.0, math.pi), half)
        with pytest.raises(OutsideRevolvedRange):
            meridian_reduce(ray3(133.0, 0.0), half)


class TestTrace3D:
    def test_base_meridian_matches_the_planar_trace(self, solid, body):
        tr = trace3d(ray3(133.0, 0.0), solid)
        planar = trace(Ray2(Point2(1.0, 0.0), Dir2.from_angle(math.radians(133.0))), body)
        assert tr.status is TraceStatus.EXITED
        assert len(tr.bounces) == len(planar.bounces) == 4
        for p, q in zip(tr.bounces, planar.bounce_points):
            assert p.distance(Point3(q.x, q.y, 0.0)) < 1e-12

    def test_rotation_commutes_with_tracing(self, solid):
        first = trace3d(ray3(132.0, 0.4), solid)
        second = trace3d(ray3(132.0, 2.1), solid)
        assert len(first.bounces) == len(second.bounces)
        for p, q in zip(first.bounces, second.bounces):
            assert rotate(p, 2.1 - 0.4).distance(q) < 1e-10
        assert rotate(first.exit.dir, 1.7).distance(second.exit.dir) < 1e-10

    def test_exit_returns_to_the_line(self, solid):
        tr = trace3d(ray3(131.0, 4.0), solid)
        assert exit_deviation3(A2_3D, tr).max < 1e-8
        assert tr.meridian == pytest.approx(4.0)

    def test_small_revolved_sweep(self, small_body):
        report = revolved_sweep(Body3D(small_body), Source.A2, 60, 5, workers=1)
        assert report.passed
        assert report.max_deviation < 1e-8

    def test_partial_revolved_sweep(self, small_body):
        report = revolved_sweep(Body3D(small_body, (0.5, 2.0)), Source.A1, 40, 5, workers=1)
        assert report.passed

    @pytest.mark.slow
    @pytest.mark.parametrize("source", list(Source))
    def test_thousand_rays_on_the_canonical_solid(self, body, source):
        report = revolved_sweep(Body3D(body), source, 1000, 42, workers=2)
        assert report.passed
        assert report.status_counts["exited"] == 1000
        assert report.max_deviation < 1e-8


class TestMesh:
    def test_full_turn_counts(self, small_body):
        solid = Body3D(small_body)
        mesh = revolve_mesh(solid, 12, 4)
        pieces = len(small_body.pieces)
        assert revolution_steps(solid, 12) == 12
        assert mesh.vertex_count == pieces * 5 * 13
        assert mesh.face_count == pieces * 12 * 4 * 2
        assert len(mesh.groups) == pieces
        assert mesh.faces.max() < mesh.vertex_count

    def test_partial_range_rounds_steps_up(self, small_body):
        solid = Body3D(small_body, (0.0, TAU / 4.0))
        assert revolution_steps(solid, 10) == 3
        mesh = revolve_mesh(solid, 10, 2)
        assert mesh.vertex_count == len(small_body.pieces) * 3 * 4

    def test_resolution_is_checked(self, small_body):
        with pytest.raises(DomainError):
            revolve_mesh(Body3D(small_body), 2, 8)
        with pytest.raises(DomainError):
            revolve_mesh(Body3D(small_body), 16, 1)

    def test_arc_vertices_stay_on_their_conics(self, small_body):
        mesh = revolve_mesh(Body3D(small_body), 8, 6)
        by_index = {piece.index: piece for piece in small_body.pieces}
        for index, v_start, v_end, _, _ in mesh.groups:
            piece = by_index[index]
            if piece.kind is not PieceKind.ARC:
                continue
            for x, y, z in mesh.vertices[v_start:v_end]:
                assert focal_residual(piece.arc.conic, Point2(x, math.hypot(y, z))) < 1e-9

    def test_obj_export(self, small_body):
        mesh = revolve_mesh(Body3D(small_body), 6, 3)
        buffer = io.StringIO()
        write_obj(mesh, buffer)
        text = buffer.getvalue()
        lines = text.splitlines()
        assert lines[0].startswith("#")
        assert sum(line.startswith("v ") for line in lines) == mesh.vertex_count
        assert sum(line.startswith("f ") for line in lines) == mesh.face_count
        assert sum(line.startswith("o piece_") for line in lines) == len(small_body.pieces)
        indices = [int(token) for line in lines if line.startswith("f ") for token in line.split()[1:]]
        assert min(indices) == 1
        assert max(indices) == mesh.vertex_count

        again = io.StringIO()
        write_obj(revolve_mesh(Body3D(small_body), 6, 3), again)
        assert again.getvalue() == text
