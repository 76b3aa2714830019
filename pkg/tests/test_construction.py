"""Derived points, validation, sequence generation and body assembly."""
import json
import math
from dataclasses import replace

import pytest

from invisible_body.core.conics import ConicKind, focal_residual
from invisible_body.core.errors import ArcClippingFailed, DomainError, InvalidConfiguration, RailExhausted
from invisible_body.core.geometry import Point2, Similarity
from invisible_body.models.construction import PieceKind, Source, Vertex
from invisible_body.schemas.config import load_config
from invisible_body.services.construction import (
    apply_perturbation,
    base_arcs,
    build_body,
    derive_points,
    describe_body,
    generate_sequence,
    homothetic_sequence,
    normalize_params,
    pair_of,
    sequence_specs,
    validate_configuration,
)

from .conftest import CONFIGS, canonical


def close(p: Point2, x: float, y: float, tol: float = 1e-6) -> bool:
    return p.distance(Point2(x, y)) < tol


class TestDerivedPoints:
    def test_canonical_points(self, params):
        d = derive_points(params)
        assert close(d.C1, -0.5, 1.5, 1e-12)
        assert close(d.C2, 0.5, 1.5, 1e-12)
        assert close(d.D1, -0.2, 2.4, 1e-12)
        assert close(d.D2, 0.2, 2.4, 1e-12)
        assert close(d.B1, -1 / 3, 4 / 3, 1e-12)
        assert close(d.B2, 1 / 3, 4 / 3, 1e-12)
        assert close(d.H1, -0.358271, 1.533458)
        assert close(d.H2, 0.358271, 1.533458)
        assert close(d.N, 0.0, 1.128978)
        assert close(d.M, 0.0, 2.389573)

    def test_explicit_h1_is_kept(self):
        d = derive_points(canonical(H1=Point2(-0.36, 1.53)))
        assert d.H1 == Point2(-0.36, 1.53)
        assert close(d.H2, 0.36, 1.53, 1e-12)

    @pytest.mark.parametrize(
        "overrides, violation",
        [
            (dict(O=Point2(0.0, 4.0)), "O_inside_LK"),
            (dict(K=Point2(0.0, 0.5)), "L_nearer_than_K"),
            (dict(K=Point2(0.0, -3.0)), "L_K_same_side"),
            (dict(L=Point2(0.2, 1.0)), "L_on_bisector"),
        ],
    )
    def test_violations_are_named(self, overrides, violation):
        with pytest.raises(InvalidConfiguration) as info:
            build_body(canonical(depth=1, **overrides))
        assert violation in info.value.violations
        assert info.value.exit_code == 2

    def test_coincident_sources(self):
        with pytest.raises(InvalidConfiguration) as info:
            build_body(canonical(A2=Point2(-1.0, 0.0)))
        assert info.value.violations == ["A1_A2_distinct"]


class TestValidation:
    def test_canonical_passes(self, params):
        report = validate_configuration(params, derive_points(params))
        assert report.passed
        assert report.failures == []
        names = {item.name for item in report.items}
        assert {"H1_on_bisector", "A2_on_NH1", "single_intersection_A2/L", "N_exterior_at_L", "arc_in_region_A1/K"} <= names
        assert "H2_on_bisector" not in names

    def test_single_intersection_counts(self, params):
        report = validate_configuration(params, derive_points(params))
        margins = {item.name: item.margin for item in report.items}
        for name in ("A2/L", "A2/C1", "A1/L", "A1/C2"):
            assert margins[f"single_intersection_{name}"] >= 0.0

    def test_asymmetric_config(self):
        cfg = load_config(CONFIGS / "asymmetric.json")
        _, p = normalize_params(cfg.to_params())
        assert p.asymmetric
        report = validate_configuration(p, derive_points(p))
        assert report.passed, report.failures
        items = {item.name: item for item in report.items}
        assert not items["H2_on_bisector"].required
        assert not items["H1_on_bisector"].required
        for name in ("A1_on_H1M", "A1_on_H2N", "A2_on_MH2", "A2_on_NH1"):
            assert items[name].passed
        for spec in sequence_specs():
            assert items[f"arc_in_region_{spec.name}"].margin > 0.0

    def test_corners_off_the_tangents_are_rejected(self):
        # incidences hold, but H1, H2 leave the bisectors and M, N the axis
        p = canonical(
            H1=Point2(-0.36, 1.53),
            H2=Point2(0.35, 1.52),
            M=Point2(-0.0110303461597112, 2.36425557871194),
            N=Point2(-0.00041135335252962, 1.1254627725216),
        )
        report = validate_configuration(p, derive_points(p))
        assert not report.passed
        assert {"arc_in_region_A2/C2", "arc_in_region_A2/K", "arc_in_region_A1/C1"} <= set(report.failures)
        assert "arc_in_region_A2/L" not in report.failures
        assert "A1_on_H1M" not in report.failures
        with pytest.raises(InvalidConfiguration) as exc:
            build_body(p)
        assert "arc_in_region_A2/C2" in exc.value.violations

    def test_broken_incidence_is_reported(self):
        p = canonical(
            H1=Point2(-0.36, 1.53),
            H2=Point2(0.35, 1.52),
            M=Point2(0.0, 2.36),
            N=Point2(0.0, 1.13),
        )
        report = validate_configuration(p, derive_points(p))
        assert not report.passed
        assert "A1_on_H1M" in report.failures


class TestFrame:
    @pytest.mark.parametrize(
        "scale, theta, shift",
        [(1.0, 0.0, Point2(0.0, 0.0)), (2.5, 0.7, Point2(3.0, -1.0)), (0.3, -2.0, Point2(-5.0, 4.0))],
    )
    def test_normalized_points_do_not_depend_on_the_caller_frame(self, params, scale, theta, shift):
        move = Similarity(scale, math.cos(theta), math.sin(theta), shift)
        frame, p = normalize_params(params.mapped(move))
        reference = derive_points(params)
        moved = derive_points(p)
        for name, point in reference.as_dict().items():
            assert moved.as_dict()[name].distance(point) < 1e-9
        assert frame.invert(p.L).distance(move.apply(params.L)) < 1e-9


class TestSequences:
    def test_specs(self):
        names = [spec.name for spec in sequence_specs()]
        assert names == ["A2/L", "A2/C1", "A2/C2", "A2/K", "A1/L", "A1/C2", "A1/C1", "A1/K"]

    def test_base_arcs_pass_through_their_vertices(self, params):
        d = derive_points(params)
        named = {"L": params.L, "K": params.K, "C1": d.C1, "C2": d.C2}
        for spec, arc in zip(sequence_specs(), base_arcs(params, d)):
            vertex = named[spec.vertex.value]
            assert focal_residual(arc.conic, vertex) < 1e-12
            assert min(arc.start.distance(vertex), arc.end.distance(vertex)) < 1e-9

    def test_sizes(self, body):
        assert len(body.sequences) == 8
        for seq in body.sequences:
            assert len(seq.arcs) == body.depth + 1
            assert len(seq.starts) == len(seq.ends) == body.depth + 1
        arcs = [piece for piece in body.pieces if piece.kind is PieceKind.ARC]
        segments = [piece for piece in body.pieces if piece.kind is PieceKind.SEGMENT]
        assert len(arcs) == 8 * (body.depth + 1)
        assert len(segments) == 8
        assert [piece.index for piece in body.pieces] == list(range(len(body.pieces)))

    def test_levels_are_confocal(self, body):
        for seq in body.sequences:
            foci = {seq.source, seq.rail_focus}
            for arc in seq.arcs:
                assert {arc.conic.f1, arc.conic.f2} == foci
                assert arc.conic.kind is seq.spec.kind

    def test_arcs_shrink(self, body):
        for seq in body.sequences:
            lengths = [arc.length() for arc in seq.arcs]
            assert all(b < a for a, b in zip(lengths, lengths[1:]))

    def test_starts_and_ends_on_rails(self, body):
        for seq in body.sequences:
            for start, end in zip(seq.starts, seq.ends):
                assert seq.rails.vertex_rail.distance(start) < 1e-9
                assert seq.rails.clip_rail.distance(end) < 1e-9

    def test_pairs(self, body):
        ellipse, hyperbola = pair_of(body, "A2/C1")
        assert ellipse.name == "A2/L"
        assert hyperbola.name == "A2/C1"
        assert ellipse.spec.kind is ConicKind.ELLIPSE

    def test_homothetic_images_share_the_ellipse_foci(self, body):
        ellipse, hyperbola = pair_of(body, "A2/L")
        for image in homothetic_sequence(hyperbola, ellipse):
            assert {image.conic.f1, image.conic.f2} == {ellipse.source, ellipse.rail_focus}

    def test_quadrangles(self, body):
        assert [quad.vertex for quad in body.quads] == list(Vertex)
        q = body.quad(Vertex.L)
        assert q.outline[0] == body.params.L
        assert q.corner.distance(body.points.N) < 1e-12

    def test_depth_zero(self):
        body = build_body(canonical(depth=0))
        assert all(len(seq.arcs) == 1 for seq in body.sequences)


class TestConstructionFailures:
    @pytest.mark.parametrize("corner, scale, sequence", [("N", 0.05, "A2/L"), ("H1", 20.0, "A2/C1")])
    def test_clip_point_past_the_corner(self, params, corner, scale, sequence):
        d = derive_points(params)
        moved = params.A2 + (getattr(d, corner) - params.A2) * scale
        with pytest.raises(ArcClippingFailed) as exc:
            base_arcs(params, replace(d, **{corner: moved}))
        assert exc.value.extra["sequence"] == sequence
        assert exc.value.exit_code == 2

    def test_start_off_the_rail(self, body):
        seq = body.sequence("A2/L")
        focus, vertex = seq.rails.vertex_rail.a, seq.rails.vertex_rail.b
        clip = seq.ends[0]
        # the line through clip meets the rail line at s = -1
        behind = focus - (vertex - focus)
        with pytest.raises(RailExhausted) as exc:
            generate_sequence(seq.spec, seq.arcs[0], seq.rails, clip + (clip - behind), 1)
        assert exc.value.extra == {"sequence": "A2/L", "level": 1}
        assert "leaves the rail" in exc.value.detail

    def test_source_line_parallel_to_the_rail(self, body):
        seq = body.sequence("A2/C2")
        focus, vertex = seq.rails.vertex_rail.a, seq.rails.vertex_rail.b
        with pytest.raises(RailExhausted, match="parallel"):
            generate_sequence(seq.spec, seq.arcs[0], seq.rails, seq.ends[0] - (vertex - focus), 3)


class TestPerturbation:
    def test_focal_constant_is_scaled(self, small_body):
        perturbed = apply_perturbation(small_body, "A2/L", 0, 1.01)
        old = small_body.sequence("A2/L").arcs[0]
        new = perturbed.sequence("A2/L").arcs[0]
        assert new.conic.k == pytest.approx(old.conic.k * 1.01)
        assert (new.theta_min, new.theta_max) == (old.theta_min, old.theta_max)
        assert perturbed.sequence("A2/C1") is small_body.sequence("A2/C1")

    def test_unknown_level(self, small_body):
        with pytest.raises(DomainError):
            apply_perturbation(small_body, "A2/L", 7, 1.01)


class TestDescription:
    def test_document(self, small_body):
        doc = describe_body(small_body)
        assert doc.depth == 3
        assert doc.validation.passed
        assert doc.arc_pieces == 32
        assert doc.segment_pieces == 8
        assert doc.points["A2"].caller == (1.0, 0.0)
        assert len(doc.sequences) == 8
        assert doc.sequences[0].focal_constants[0] == pytest.approx(
            small_body.sequence("A2/L").arcs[0].conic.k
        )
        json.loads(doc.model_dump_json())

    def test_source_points(self, small_body):
        assert small_body.source_point(Source.A1) == Point2(-1.0, 0.0)
        assert small_body.source_point(Source.A2) == Point2(1.0, 0.0)
