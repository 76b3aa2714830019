"""
Construction of the body invisible from two points.

Everything is built in the normalized frame A1 = (-1, 0), A2 = (1, 0);
`Body2D.frame` carries the similarity back to the caller's coordinates.
"""
import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.conics import Conic, ConicArc, ConicKind, conic_through, ray_conic_intersections
from ..core.const import EPS_GEOM, EPS_T
from ..core.errors import (
    ArcClippingFailed,
    DegenerateConic,
    DomainError,
    InvalidConfiguration,
    OutOfExtent,
    RailExhausted,
)
from ..core.geometry import (
    Dir2,
    Line2,
    Point2,
    Ray2,
    Segment2,
    Similarity,
    collinearity_residual,
    convex_margin,
    homothety,
    intersect_through,
    line_params,
    mirror_point,
    polygon_excess,
    ray_segment_hit,
)
from ..models.construction import (
    ArcSequence,
    Body2D,
    ConstructionParams,
    DerivedPoints,
    Piece,
    PieceKind,
    Quadrangle,
    RailMode,
    Rails,
    SequenceSpec,
    Source,
    Vertex,
)
from ..schemas.body import BodyDocument, FrameDocument, PieceDocument, PointPair, SequenceDocument
from ..schemas.report import ValidationItem, ValidationReport

logger = logging.getLogger(__name__)

ELLIPSE = ConicKind.ELLIPSE
HYPERBOLA = ConicKind.HYPERBOLA_BRANCH

SEQUENCE_SPECS: Tuple[SequenceSpec, ...] = (
    SequenceSpec("A2/L", Source.A2, Vertex.L, ELLIPSE, "B2", "N"),
    SequenceSpec("A2/C1", Source.A2, Vertex.C1, HYPERBOLA, "D1", "H1"),
    SequenceSpec("A2/C2", Source.A2, Vertex.C2, ELLIPSE, "B2", "H2"),
    SequenceSpec("A2/K", Source.A2, Vertex.K, HYPERBOLA, "D1", "M"),
    SequenceSpec("A1/L", Source.A1, Vertex.L, ELLIPSE, "B1", "N"),
    SequenceSpec("A1/C2", Source.A1, Vertex.C2, HYPERBOLA, "D2", "H2"),
    SequenceSpec("A1/C1", Source.A1, Vertex.C1, ELLIPSE, "B1", "H1"),
    SequenceSpec("A1/K", Source.A1, Vertex.K, HYPERBOLA, "D2", "M"),
)

# (ellipse sequence, hyperbola sequence) sharing a source and a first-hit cone
SEQUENCE_PAIRS: Tuple[Tuple[str, str], ...] = (
    ("A2/L", "A2/C1"),
    ("A2/C2", "A2/K"),
    ("A1/L", "A1/C2"),
    ("A1/C1", "A1/K"),
)

# Perpendicular bisector of A1A2 in the normalized frame
SYMMETRY_AXIS = Line2(Point2(0.0, 0.0), Dir2(0.0, 1.0))

NORMALIZED_A1 = Point2(-1.0, 0.0)
NORMALIZED_A2 = Point2(1.0, 0.0)

# Polyline resolution of each base arc in a quadrangle outline
OUTLINE_SAMPLES = 48


def sequence_specs() -> Tuple[SequenceSpec, ...]:
    return SEQUENCE_SPECS


# Points

def normalize_params(params: ConstructionParams) -> Tuple[Similarity, ConstructionParams]:
    """Frame taking A1, A2 to (-1, 0), (1, 0) and the parameters expressed in it"""
    try:
        frame = Similarity.normalizing(params.A1, params.A2)
    except DomainError:
        raise InvalidConfiguration(["A1_A2_distinct"])
    mapped = params.mapped(frame)
    return frame, replace(mapped, A1=NORMALIZED_A1, A2=NORMALIZED_A2)


def _raw_violations(p: ConstructionParams) -> List[str]:
    violations = []
    if p.depth < 0:
        violations.append("depth_nonnegative")
    if abs(p.L.x) > EPS_GEOM:
        violations.append("L_on_bisector")
    if abs(p.K.x) > EPS_GEOM:
        violations.append("K_on_bisector")
    if p.L.y * p.K.y <= 0.0:
        violations.append("L_K_same_side")
    elif abs(p.L.y) >= abs(p.K.y) - EPS_GEOM:
        violations.append("L_nearer_than_K")
    lo, hi = min(p.L.y, p.K.y), max(p.L.y, p.K.y)
    if abs(p.O.x) > EPS_GEOM or not lo + EPS_GEOM < p.O.y < hi - EPS_GEOM:
        violations.append("O_inside_LK")
    return violations


def default_h1(C1: Point2, B1: Point2, D1: Point2, O: Point2) -> Point2:
    """Midpoint of the chord cut by quadrangle B1C1D1O on the bisector of angle B1C1D1"""
    ray = Ray2(C1, Dir2.of(Dir2.between(C1, B1) + Dir2.between(C1, D1)))
    exits = []
    for side in (Segment2(D1, O), Segment2(O, B1)):
        hit = ray_segment_hit(ray, side)
        if hit is not None and hit[0] > EPS_T:
            exits.append(hit[0])
    if not exits:
        raise InvalidConfiguration(["H1_default_undefined"])
    return ray.at(0.5 * min(exits))


def derive_points(p: ConstructionParams) -> DerivedPoints:
    """Derive every named point of a normalized configuration"""
    violations = _raw_violations(p)
    if violations:
        raise InvalidConfiguration(violations)

    def meet(name: str, a: Point2, b: Point2, c: Point2, d: Point2) -> Optional[Point2]:
        q = intersect_through(a, b, c, d)
        if q is None:
            violations.append(f"{name}_undefined")
        return q

    C1 = meet("C1", p.A1, p.K, p.A2, p.L)
    C2 = meet("C2", p.A2, p.K, p.A1, p.L)
    D2 = meet("D2", p.A2, p.K, p.A1, p.O)
    D1 = meet("D1", p.A1, p.K, p.A2, p.O)
    if violations:
        raise InvalidConfiguration(violations)
    B1 = meet("B1", p.A1, D2, C1, p.L)
    B2 = meet("B2", p.A2, D1, C2, p.L)
    if violations:
        raise InvalidConfiguration(violations)

    H1 = p.H1 if p.H1 is not None else default_h1(C1, B1, D1, p.O)
    if p.asymmetric:
        H2, M, N = p.H2, p.M, p.N
    else:
        H2 = mirror_point(H1, SYMMETRY_AXIS)
        N = meet("N", p.A1, H2, p.A2, H1)
        M = meet("M", p.A1, H1, p.A2, H2)
        if violations:
            raise InvalidConfiguration(violations)

    if convex_margin(N, (p.O, B2, p.L, B1)) < -EPS_GEOM:
        violations.append("N_in_OB2LB1")
    if convex_margin(M, (p.O, D1, p.K, D2)) < -EPS_GEOM:
        violations.append("M_in_OD1KD2")
    if violations:
        raise InvalidConfiguration(violations)

    points = DerivedPoints(C1=C1, C2=C2, D1=D1, D2=D2, B1=B1, B2=B2, N=N, M=M, H1=H1, H2=H2)
    logger.info("derived points: %s", ", ".join(f"{k}=({v.x:.6g}, {v.y:.6g})" for k, v in points.as_dict().items()))
    return points


def named_points(p: ConstructionParams, d: DerivedPoints) -> Dict[str, Point2]:
    named = {"A1": p.A1, "A2": p.A2, "L": p.L, "K": p.K, "O": p.O}
    named.update(d.as_dict())
    return named


def _vertex_conic(spec: SequenceSpec, named: Dict[str, Point2]) -> Conic:
    source = named[spec.source.value]
    focus = named[spec.rail_focus]
    vertex = named[spec.vertex.value]
    return conic_through(spec.kind, source, focus, vertex, focus if spec.kind is HYPERBOLA else None)


def arc_region(spec: SequenceSpec, named: Dict[str, Point2], clip: Point2) -> Tuple[Point2, ...]:
    """Quadrangle (rail focus, vertex, corner, clip point) holding the whole sequence"""
    return named[spec.rail_focus], named[spec.vertex.value], named[spec.corner], clip


# Validation

def _bisector(apex: Point2, a: Point2, b: Point2) -> Line2:
    return Line2(apex, Dir2.of(Dir2.between(apex, a) + Dir2.between(apex, b)))


def _exterior_margin(conic: Conic, q: Point2) -> float:
    """Positive when q is outside the convex region bounded by the curve"""
    value = conic.focal_value(q)
    return value if conic.is_ellipse else -value


def _segment_crosses(a: Point2, b: Point2, conic: Conic) -> bool:
    length = a.distance(b)
    hits = ray_conic_intersections(Ray2.through(a, b), conic)
    return any(EPS_T < t < length - EPS_GEOM for t, _ in hits)


def validate_configuration(p: ConstructionParams, d: DerivedPoints) -> ValidationReport:
    """Check every positional constraint of a derived configuration; failures go in the report"""
    named = named_points(p, d)
    items: List[ValidationItem] = []

    # Bisector membership, a construction rule only in symmetric mode
    for corner, apex, a, b in (("H1", d.C1, d.B1, d.D1), ("H2", d.C2, d.B2, d.D2)):
        if corner == "H2" and not p.asymmetric:
            continue
        dist = _bisector(apex, a, b).distance(named[corner])
        items.append(ValidationItem(
            name=f"{corner}_on_bisector",
            passed=dist <= EPS_GEOM,
            margin=EPS_GEOM - dist,
            required=not p.asymmetric,
        ))

    for name, point, quad in (
        ("H1_in_B1C1D1O", d.H1, (d.B1, d.C1, d.D1, p.O)),
        ("H2_in_B2C2D2O", d.H2, (d.B2, d.C2, d.D2, p.O)),
        ("M_in_OD1KD2", d.M, (p.O, d.D1, p.K, d.D2)),
        ("N_in_OB2LB1", d.N, (p.O, d.B2, p.L, d.B1)),
    ):
        margin = convex_margin(point, quad)
        items.append(ValidationItem(name=name, passed=margin > EPS_GEOM, margin=margin))

    conics: Dict[str, Conic] = {}
    for spec in SEQUENCE_SPECS:
        try:
            conics[spec.name] = _vertex_conic(spec, named)
        except DegenerateConic as exc:
            items.append(ValidationItem(name=f"conic_{spec.name}", passed=False, margin=0.0, detail=exc.detail))

    for vertex in Vertex:
        specs = [spec for spec in SEQUENCE_SPECS if spec.vertex is vertex]
        corner = specs[0].corner
        if not all(spec.name in conics for spec in specs):
            continue
        margin = min(_exterior_margin(conics[spec.name], named[corner]) for spec in specs)
        items.append(ValidationItem(name=f"{corner}_exterior_at_{vertex.value}", passed=margin > EPS_GEOM, margin=margin))

    for name, a, b, c in (
        ("A1_on_H1M", p.A1, d.H1, d.M),
        ("A1_on_H2N", p.A1, d.H2, d.N),
        ("A2_on_MH2", p.A2, d.M, d.H2),
        ("A2_on_NH1", p.A2, d.N, d.H1),
    ):
        residual = collinearity_residual(a, b, c)
        items.append(ValidationItem(name=name, passed=residual <= EPS_GEOM, margin=EPS_GEOM - residual))

    for spec in SEQUENCE_SPECS:
        pair = [other for other in SEQUENCE_SPECS if other.vertex is spec.vertex]
        if not all(other.name in conics for other in pair):
            continue
        source, corner = named[spec.source.value], named[spec.corner]
        if source.distance(corner) <= EPS_GEOM:
            count = len(pair)
        else:
            count = sum(1 for other in pair if _segment_crosses(source, corner, conics[other.name]))
        items.append(ValidationItem(
            name=f"single_intersection_{spec.name}",
            passed=count <= 1,
            margin=1.0 - count,
            detail=f"{count} curve(s) through {spec.vertex.value} crossed",
        ))

    for spec in SEQUENCE_SPECS:
        if spec.name not in conics:
            continue
        try:
            arc, clip = _base_arc(spec, named)
        except ArcClippingFailed:
            # build_body reports it
            continue
        region = arc_region(spec, named, clip)
        excess = max(polygon_excess(q, region) for q in arc.sample(OUTLINE_SAMPLES))
        items.append(ValidationItem(
            name=f"arc_in_region_{spec.name}",
            passed=excess < EPS_GEOM,
            margin=EPS_GEOM - excess,
        ))

    passed = all(item.passed for item in items if item.required)
    for item in items:
        if not item.passed and not item.required:
            logger.warning("optional constraint %s fails (margin %.3g)", item.name, item.margin)
    return ValidationReport(items=items, passed=passed)


# Arcs and sequences

def _base_arc(spec: SequenceSpec, named: Dict[str, Point2]) -> Tuple[ConicArc, Point2]:
    source = named[spec.source.value]
    vertex = named[spec.vertex.value]
    corner = named[spec.corner]
    conic = _vertex_conic(spec, named)
    reach = source.distance(corner)
    hits = ray_conic_intersections(Ray2.through(source, corner), conic)
    if not hits:
        raise ArcClippingFailed(f"{spec.name}: line {spec.source.value}{spec.corner} misses the base curve", sequence=spec.name)
    t, clip = hits[0]
    inside = t < reach if spec.kind is ELLIPSE else t > reach
    if not inside:
        raise ArcClippingFailed(
            f"{spec.name}: clip point falls outside the allowed part of line {spec.source.value}{spec.corner}",
            sequence=spec.name,
        )
    try:
        arc = ConicArc.between(conic, source, vertex, clip)
    except OutOfExtent as exc:
        raise ArcClippingFailed(f"{spec.name}: {exc.detail}", sequence=spec.name) from exc
    return arc, clip


def base_arcs(p: ConstructionParams, d: DerivedPoints) -> Tuple[ConicArc, ...]:
    """The eight base arcs, in SEQUENCE_SPECS order"""
    named = named_points(p, d)
    return tuple(_base_arc(spec, named)[0] for spec in SEQUENCE_SPECS)


def generate_sequence(
    spec: SequenceSpec,
    base: ConicArc,
    rails: Rails,
    source: Point2,
    depth: int,
) -> ArcSequence:
    """
    Extend a base arc into a truncated sequence of confocal arcs.

    Level i+1 starts where the line from the source through the end of
    level i meets the vertex rail; in ellipse-rail mode that meeting
    lies between the source and the old end, in hyperbola-rail mode on
    the extension beyond it. The new arc ends where its conic crosses
    the clip rail.
    """
    focus, vertex = rails.vertex_rail.a, rails.vertex_rail.b
    clip = rails.clip_rail.b
    clip_ray = Ray2.through(focus, clip)
    clip_reach = rails.clip_rail.length
    branch = focus if base.conic.kind is HYPERBOLA else None

    arcs = [base]
    starts = [vertex]
    ends = [clip]
    for level in range(1, depth + 1):
        params = line_params(source, ends[-1] - source, focus, vertex - focus)
        if params is None:
            raise RailExhausted(f"{spec.name} level {level}: source line is parallel to the rail", sequence=spec.name, level=level)
        t, s = params
        along = 0.0 < t < 1.0 if spec.mode is RailMode.ELLIPSE_RAIL else t > 1.0
        if not (0.0 < s < 1.0 and along):
            raise RailExhausted(f"{spec.name} level {level}: start leaves the rail (s={s:.6g}, t={t:.6g})", sequence=spec.name, level=level)
        start = rails.vertex_rail.point_at(s)
        try:
            conic = conic_through(base.conic.kind, source, focus, start, branch)
        except DegenerateConic as exc:
            raise RailExhausted(f"{spec.name} level {level}: {exc.detail}", sequence=spec.name, level=level) from exc
        hits = ray_conic_intersections(clip_ray, conic)
        if not hits or hits[0][0] >= clip_reach:
            raise RailExhausted(f"{spec.name} level {level}: end leaves the clip rail", sequence=spec.name, level=level)
        end = hits[0][1]
        arcs.append(ConicArc.between(conic, source, start, end))
        starts.append(start)
        ends.append(end)
        logger.debug("%s level %d: rail s=%.12g, k=%.15g", spec.name, level, s, conic.k)

    return ArcSequence(
        spec=spec,
        source=source,
        rail_focus=focus,
        arcs=tuple(arcs),
        starts=tuple(starts),
        ends=tuple(ends),
        rails=rails,
    )


def homothetic_sequence(hyperbola: ArcSequence, ellipse: ArcSequence) -> Tuple[ConicArc, ...]:
    """
    Images of the hyperbola arcs under the dilation at the source taking
    the hyperbola rail focus to the ellipse rail focus; each image lies on
    a hyperbola branch with foci (source, ellipse rail focus).
    """
    source = hyperbola.source
    near = ellipse.rail_focus
    ratio = source.distance(near) / source.distance(hyperbola.rail_focus)
    images = []
    for start, end in zip(hyperbola.starts, hyperbola.ends):
        p = homothety(source, ratio, start)
        q = homothety(source, ratio, end)
        conic = conic_through(HYPERBOLA, source, near, p, near)
        images.append(ConicArc.between(conic, source, p, q))
    return tuple(images)


# Body assembly

def _arc_path(arc: ConicArc, start: Point2, end: Point2) -> List[Point2]:
    pts = arc.sample(OUTLINE_SAMPLES)
    if pts[0].distance(start) > pts[-1].distance(start):
        pts.reverse()
    pts[0], pts[-1] = start, end
    return pts


def _build_quads(sequences: Sequence[ArcSequence], named: Dict[str, Point2]) -> Tuple[Quadrangle, ...]:
    quads = []
    for vertex in Vertex:
        first, second = [seq for seq in sequences if seq.spec.vertex is vertex]
        corner = named[first.spec.corner]
        v = named[vertex.value]
        a_end, b_end = first.ends[0], second.ends[0]
        outline = _arc_path(first.arcs[0], v, a_end) + [corner] + _arc_path(second.arcs[0], b_end, v)[:-1]
        quads.append(Quadrangle(
            vertex=vertex,
            corner=corner,
            arcs=(first.arcs[0], second.arcs[0]),
            segments=(Segment2(a_end, corner), Segment2(corner, b_end)),
            outline=tuple(outline),
        ))
    return tuple(quads)


def _assemble_pieces(sequences: Sequence[ArcSequence], quads: Sequence[Quadrangle]) -> Tuple[Piece, ...]:
    pieces: List[Piece] = []
    for seq in sequences:
        for level, arc in enumerate(seq.arcs):
            center, radius = arc.bounding_circle
            pieces.append(Piece(
                index=len(pieces),
                kind=PieceKind.ARC,
                label=f"{seq.name}[{level}]",
                center=center,
                radius=radius,
                arc=arc,
                sequence=seq.name,
                level=level,
                quad=seq.spec.vertex if level == 0 else None,
            ))
    for quad in quads:
        for j, seg in enumerate(quad.segments):
            pieces.append(Piece(
                index=len(pieces),
                kind=PieceKind.SEGMENT,
                label=f"Q_{quad.vertex.value}/{j}",
                center=seg.point_at(0.5),
                radius=0.5 * seg.length + EPS_GEOM,
                segment=seg,
                quad=quad.vertex,
            ))
    return tuple(pieces)


def _check_rails(sequences: Sequence[ArcSequence]) -> None:
    violations = []
    for seq in sequences:
        for level, (arc, start, end) in enumerate(zip(seq.arcs, seq.starts, seq.ends)):
            on_rails = (
                seq.rails.vertex_rail.distance(start) <= EPS_GEOM
                and seq.rails.clip_rail.distance(end) <= EPS_GEOM
            )
            ends_match = min(
                max(arc.start.distance(start), arc.end.distance(end)),
                max(arc.start.distance(end), arc.end.distance(start)),
            ) <= EPS_GEOM
            if not (on_rails and ends_match):
                violations.append(f"rail_membership:{seq.name}[{level}]")
    if violations:
        raise InvalidConfiguration(violations)


def build_body(params: ConstructionParams) -> Body2D:
    """Derive, validate and assemble the full body for a caller-frame configuration"""
    frame, p = normalize_params(params)
    points = derive_points(p)
    report = validate_configuration(p, points)
    if not report.passed:
        raise InvalidConfiguration(report.failures)

    named = named_points(p, points)
    sequences = []
    for spec in SEQUENCE_SPECS:
        base, clip = _base_arc(spec, named)
        focus = named[spec.rail_focus]
        rails = Rails(
            vertex_rail=Segment2(focus, named[spec.vertex.value]),
            clip_rail=Segment2(focus, clip),
        )
        sequences.append(generate_sequence(spec, base, rails, named[spec.source.value], p.depth))
    logger.info("generated %d sequences at depth %d", len(sequences), p.depth)

    _check_rails(sequences)
    quads = _build_quads(sequences, named)
    pieces = _assemble_pieces(sequences, quads)
    body = Body2D(params=p, points=points, frame=frame, sequences=tuple(sequences), quads=quads, pieces=pieces)
    logger.info(
        "built body: %d arc pieces, %d segment pieces",
        sum(1 for piece in pieces if piece.kind is PieceKind.ARC),
        sum(1 for piece in pieces if piece.kind is PieceKind.SEGMENT),
    )
    return body


def sequence_pairs(body: Body2D) -> List[Tuple[ArcSequence, ArcSequence]]:
    return [(body.sequence(e), body.sequence(h)) for e, h in SEQUENCE_PAIRS]


def pair_of(body: Body2D, name: str) -> Tuple[ArcSequence, ArcSequence]:
    """The (ellipse, hyperbola) pair a sequence belongs to"""
    for e, h in SEQUENCE_PAIRS:
        if name in (e, h):
            return body.sequence(e), body.sequence(h)
    raise KeyError(name)


def apply_perturbation(body: Body2D, sequence: str, arc: int, factor: float) -> Body2D:
    """Rescale the focal constant of one arc, keeping its angular extent about the pivot"""
    seq = body.sequence(sequence)
    if arc > seq.depth:
        raise DomainError(f"{sequence} has no arc {arc} (depth {seq.depth})")
    old = seq.arcs[arc]
    try:
        new = old.with_conic(old.conic.with_constant(old.conic.k * factor))
    except (DegenerateConic, OutOfExtent) as exc:
        raise DomainError(f"cannot perturb {sequence}[{arc}] by {factor}: {exc.detail}") from exc
    arcs = list(seq.arcs)
    arcs[arc] = new
    perturbed = replace(seq, arcs=tuple(arcs))
    sequences = tuple(perturbed if s.name == sequence else s for s in body.sequences)
    quads = _build_quads(sequences, named_points(body.params, body.points))
    logger.warning("perturbed %s[%d]: focal constant x %g", sequence, arc, factor)
    return replace(body, sequences=sequences, quads=quads, pieces=_assemble_pieces(sequences, quads))


# Reporting

def describe_body(body: Body2D, report: Optional[ValidationReport] = None) -> BodyDocument:
    """JSON description of a built body, points in both frames"""
    if report is None:
        report = validate_configuration(body.params, body.points)
    named = named_points(body.params, body.points)
    return BodyDocument(
        depth=body.depth,
        frame=FrameDocument(scale=body.frame.scale, rotation=body.frame.rotation, shift=body.frame.shift.as_tuple()),
        points={
            name: PointPair(normalized=p.as_tuple(), caller=body.frame.invert(p).as_tuple())
            for name, p in named.items()
        },
        validation=report,
        sequences=[
            SequenceDocument(
                name=seq.name,
                source=seq.spec.source.value,
                vertex=seq.spec.vertex.value,
                kind=seq.spec.kind.value,
                rail_focus=seq.spec.rail_focus,
                corner=seq.spec.corner,
                focal_constants=[arc.conic.k for arc in seq.arcs],
                starts=[body.frame.invert(p).as_tuple() for p in seq.starts],
                ends=[body.frame.invert(p).as_tuple() for p in seq.ends],
            )
            for seq in body.sequences
        ],
        arc_pieces=sum(1 for piece in body.pieces if piece.kind is PieceKind.ARC),
        segment_pieces=sum(1 for piece in body.pieces if piece.kind is PieceKind.SEGMENT),
        pieces=[
            PieceDocument(
                index=piece.index,
                kind=piece.kind.value,
                label=piece.label,
                sequence=piece.sequence,
                level=piece.level,
                quad=piece.quad.value if piece.quad is not None else None,
            )
            for piece in body.pieces
        ],
    )
