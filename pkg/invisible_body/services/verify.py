"""
Invisibility sweeps and construction audits.

Directions are sampled uniformly over the handled cone, the part of the
cone of rays from a source that meets the truncated sequences early
enough to be carried through all four reflections.
"""
import logging
import math
import time
from collections import Counter
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import settings
from ..core.conics import ConicKind, confocal_crossing, focal_residual, tangent_at
from ..core.const import DELTA_CONE, EPS_GEOM, TAU_AUDIT, TAU_INV
from ..core.errors import KernelError
from ..core.geometry import Dir2, Point2, Ray2, collinearity_residual, homothety, polar_angle, polygon_excess
from ..models.construction import Body2D, ConstructionParams, Source, Vertex
from ..models.trace import TraceResult, TraceStatus
from ..schemas.report import AuditCheck, AuditReport, RayRecord, SweepReport
from .billiard import exit_deviation, focal_line_residuals, trace_many
from .construction import apply_perturbation, arc_region, build_body, homothetic_sequence, named_points, sequence_pairs

logger = logging.getLogger(__name__)

RNG_NAME = "numpy.PCG64"

Interval = Tuple[float, float]

# Sample points per arc for the homothety and containment audits
AUDIT_SAMPLES = 8


# Handled cone

def handled_cone(body: Body2D, source: Source) -> List[Interval]:
    """Normalized-frame direction intervals from the source that the truncated body handles"""
    raw: List[Interval] = []
    for seq in body.sequences:
        if seq.spec.source is not source or seq.spec.kind is not ConicKind.ELLIPSE:
            continue
        for arc in seq.arcs[:seq.depth]:
            lo, hi = arc.theta_min + DELTA_CONE, arc.theta_max - DELTA_CONE
            if hi > lo:
                raw.append((lo, hi))
    raw.sort()
    merged: List[Interval] = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def full_cone(body: Body2D, source: Source) -> float:
    """Opening of the angle between the source's directions to its near C vertex and to K"""
    p = body.params
    near_c = body.points.C1 if source is Source.A2 else body.points.C2
    s = body.source_point(source)
    return abs(math.remainder(polar_angle(near_c, s) - polar_angle(p.K, s), 2.0 * math.pi))


def handled_cone_coverage(body: Body2D, source: Source) -> float:
    measure = sum(hi - lo for lo, hi in handled_cone(body, source))
    return measure / full_cone(body, source)


def sample_directions(intervals: Sequence[Interval], n: int, rng: np.random.Generator) -> np.ndarray:
    """n angles uniform over the union of disjoint intervals"""
    if not intervals:
        return np.empty(0)
    lows = np.array([lo for lo, _ in intervals])
    widths = np.array([hi - lo for lo, hi in intervals])
    cumulative = np.cumsum(widths)
    u = rng.uniform(0.0, cumulative[-1], size=n)
    idx = np.minimum(np.searchsorted(cumulative, u, side="right"), len(intervals) - 1)
    return lows[idx] + (u - (cumulative[idx] - widths[idx]))


# Sweeps

def _to_caller_angle(body: Body2D, theta: float) -> float:
    return math.remainder(theta - body.frame.rotation, 2.0 * math.pi)


def sweep_traces(
    body: Body2D,
    source: Source,
    n_rays: int,
    seed: int,
    workers: Optional[int] = None,
) -> Tuple[np.ndarray, List[TraceResult]]:
    """Sample and trace n_rays directions; angles are in the normalized frame"""
    rng = np.random.default_rng(seed)
    angles = sample_directions(handled_cone(body, source), n_rays, rng)
    origin = body.source_point(source)
    rays = [Ray2(origin, Dir2.from_angle(float(theta))) for theta in angles]
    logger.info("sweep from %s: tracing %d rays", source.value, len(rays))
    traces = trace_many(rays, body, workers=workers if workers is not None else settings.WORKERS)
    return angles, traces


def summarize_sweep(
    body: Body2D,
    source: Source,
    n_rays: int,
    seed: int,
    traces: Sequence[TraceResult],
    wall_time: Optional[float] = None,
) -> SweepReport:
    origin = body.source_point(source)
    statuses = Counter(tr.status for tr in traces)
    histogram = Counter(len(tr.bounces) for tr in traces)
    deviations, angles_dev, distances, offsets, focal = [], [], [], [], [0.0]
    for tr in traces:
        if tr.status is not TraceStatus.EXITED:
            continue
        m = exit_deviation(origin, tr)
        deviations.append(m.max)
        angles_dev.append(m.angle)
        distances.append(m.source_distance)
        offsets.append(m.line_offset)
        residuals = focal_line_residuals(tr, body)
        if residuals is not None:
            focal.append(max(residuals))

    degenerate = statuses[TraceStatus.DEGENERATE_HIT]
    segment_hits = sum(tr.segment_hits for tr in traces)
    max_deviation = max(deviations, default=0.0)
    cone = handled_cone(body, source)
    passed = (
        len(traces) > 0
        and statuses[TraceStatus.EXITED] + degenerate == len(traces)
        and max_deviation < TAU_INV
        and segment_hits == 0
    )
    if degenerate:
        logger.warning("%d degenerate rays from %s", degenerate, source.value)
    if not cone:
        logger.warning("handled cone from %s is empty at depth %d", source.value, body.depth)
    return SweepReport(
        source=source.value,
        source_point=body.frame.invert(origin).as_tuple(),
        n_rays=n_rays,
        seed=seed,
        rng=RNG_NAME,
        depth=body.depth,
        handled_cone=[(_to_caller_angle(body, lo), _to_caller_angle(body, lo) + (hi - lo)) for lo, hi in cone],
        coverage=handled_cone_coverage(body, source),
        status_counts={status.value: statuses[status] for status in TraceStatus},
        bounce_histogram={str(k): histogram[k] for k in sorted(histogram)},
        degenerate_count=degenerate,
        segment_hits=segment_hits,
        unhandled_count=n_rays - len(traces),
        max_deviation=max_deviation,
        mean_deviation=float(np.mean(deviations)) if deviations else 0.0,
        max_angle=max(angles_dev, default=0.0),
        max_source_distance=max(distances, default=0.0),
        max_line_offset=max(offsets, default=0.0),
        max_focal_line_residual=max(focal),
        wall_time=wall_time,
        passed=passed,
    )


def invisibility_sweep(
    body: Body2D,
    source: Source,
    n_rays: int,
    seed: int,
    workers: Optional[int] = None,
    timing: bool = False,
) -> SweepReport:
    """Trace n_rays seeded directions from the source and aggregate their exit deviations"""
    started = time.perf_counter()
    _, traces = sweep_traces(body, source, n_rays, seed, workers)
    elapsed = time.perf_counter() - started
    report = summarize_sweep(body, source, n_rays, seed, traces, elapsed if timing else None)
    logger.info("sweep from %s done in %.2fs: max deviation %.3g", source.value, elapsed, report.max_deviation)
    return report


def ray_records(body: Body2D, source: Source, angles: Sequence[float], traces: Sequence[TraceResult]) -> List[RayRecord]:
    """Per-ray documents in the caller's frame"""
    frame = body.frame
    origin = body.source_point(source)
    records = []
    for theta, tr in zip(angles, traces):
        metrics = exit_deviation(origin, tr) if tr.status is TraceStatus.EXITED else None
        records.append(RayRecord(
            source=source.value,
            angle=_to_caller_angle(body, float(theta)),
            origin=frame.invert(tr.initial.origin).as_tuple(),
            direction=frame.invert_dir(tr.initial.dir).as_tuple(),
            status=tr.status.value,
            bounces=[frame.invert(p).as_tuple() for p in tr.bounce_points],
            pieces=[hit.piece.label for hit in tr.bounces],
            exit_origin=frame.invert(tr.exit.origin).as_tuple() if tr.exit is not None else None,
            exit_direction=frame.invert_dir(tr.exit.dir).as_tuple() if tr.exit is not None else None,
            angle_deviation=metrics.angle if metrics else None,
            source_distance=metrics.source_distance if metrics else None,
            line_offset=metrics.line_offset if metrics else None,
        ))
    return records


def perturbation_response(
    params: ConstructionParams,
    factors: Sequence[float],
    sequence: str = "A2/L",
    arc: int = 0,
    n_rays: int = 200,
    seed: int = 42,
) -> List[Tuple[float, float]]:
    """Mean exit deviation from the perturbed sequence's source for each focal-constant factor.

    Every sampled ray counts; one that does not exit counts as pi.
    """
    body = build_body(params)
    source = body.sequence(sequence).spec.source
    origin = body.source_point(source)
    out = []
    for factor in factors:
        perturbed = apply_perturbation(body, sequence, arc, factor)
        _, traces = sweep_traces(perturbed, source, n_rays, seed, workers=1)
        deviations = [
            exit_deviation(origin, tr).max if tr.status is TraceStatus.EXITED else math.pi
            for tr in traces
        ]
        mean = float(np.mean(deviations)) if deviations else 0.0
        logger.debug("factor %.6g: mean deviation %.3g over %d rays", factor, mean, len(deviations))
        out.append((factor, mean))
    return out


# Audit

def _check(name: str, residuals: Sequence[float], threshold: float = TAU_AUDIT, detail: Optional[str] = None) -> AuditCheck:
    worst = max(residuals, default=0.0)
    return AuditCheck(
        name=name,
        worst_residual=worst,
        threshold=threshold,
        samples=len(residuals),
        passed=worst < threshold,
        detail=detail,
    )


def _paired_collinearity(body: Body2D) -> AuditCheck:
    residuals = []
    for ellipse, hyperbola in sequence_pairs(body):
        s = ellipse.source
        for i in range(ellipse.depth + 1):
            residuals.append(collinearity_residual(s, ellipse.ends[i], hyperbola.ends[i]))
            residuals.append(collinearity_residual(s, ellipse.starts[i], hyperbola.starts[i]))
    return _check("paired_collinearity", residuals)


def _homothety_transport(body: Body2D) -> AuditCheck:
    residuals = []
    for ellipse, hyperbola in sequence_pairs(body):
        s = ellipse.source
        residuals.append(collinearity_residual(s, hyperbola.rail_focus, ellipse.rail_focus))
        ratio = s.distance(ellipse.rail_focus) / s.distance(hyperbola.rail_focus)
        for arc, image in zip(hyperbola.arcs, homothetic_sequence(hyperbola, ellipse)):
            for p in arc.sample(AUDIT_SAMPLES):
                residuals.append(focal_residual(image.conic, homothety(s, ratio, p)))
    return _check("homothety_transport", residuals)


def _vertex_tangency(body: Body2D) -> AuditCheck:
    named = named_points(body.params, body.points)
    residuals = []
    for vertex in Vertex:
        first, second = [seq for seq in body.sequences if seq.spec.vertex is vertex]
        v = named[vertex.value]
        t1 = tangent_at(first.arcs[0].conic, v)
        t2 = tangent_at(second.arcs[0].conic, v)
        residuals.append(abs(t1.cross(t2)))
    return _check("vertex_tangency", residuals)


def _rail_membership(body: Body2D) -> AuditCheck:
    residuals = []
    for seq in body.sequences:
        residuals.extend(seq.rails.vertex_rail.distance(p) for p in seq.starts)
        residuals.extend(seq.rails.clip_rail.distance(p) for p in seq.ends)
    return _check("rail_membership", residuals)


def _vanishing_lengths(body: Body2D) -> AuditCheck:
    """Worst fitted contraction ratio; every sequence must also shrink strictly"""
    ratios = []
    growing = []
    for seq in body.sequences:
        lengths = [arc.length() for arc in seq.arcs]
        if any(b >= a for a, b in zip(lengths, lengths[1:])):
            growing.append(seq.name)
        for i in range(1, len(lengths)):
            ratios.append((lengths[i] / lengths[0]) ** (1.0 / i))
    check = _check("vanishing_lengths", ratios, threshold=1.0, detail=", ".join(growing) or None)
    if growing:
        check = check.model_copy(update={"passed": False})
    return check


def _containment(body: Body2D) -> AuditCheck:
    named = named_points(body.params, body.points)
    residuals = []
    for seq in body.sequences:
        region = arc_region(seq.spec, named, seq.ends[0])
        for arc in seq.arcs:
            residuals.extend(polygon_excess(p, region) for p in arc.sample(AUDIT_SAMPLES))
    return _check("containment", residuals)


def _confocal_crossing(body: Body2D) -> AuditCheck:
    named = named_points(body.params, body.points)
    residuals = []
    for ellipse, hyperbola in sequence_pairs(body):
        images = homothetic_sequence(hyperbola, ellipse)
        side = named[ellipse.spec.vertex.value]
        crossings = [confocal_crossing(arc.conic, image.conic, side) for arc, image in zip(ellipse.arcs, images)]
        for u in crossings[1:]:
            residuals.append(collinearity_residual(ellipse.rail_focus, crossings[0], u))
    return _check("confocal_crossing", residuals)


def _mirror_symmetry(body: Body2D) -> AuditCheck:
    residuals = []
    for seq in body.sequences:
        if seq.spec.source is not Source.A2:
            continue
        vertex = {Vertex.C1: Vertex.C2, Vertex.C2: Vertex.C1}.get(seq.spec.vertex, seq.spec.vertex)
        mate = next(m for m in body.sequences if m.spec.source is Source.A1 and m.spec.vertex is vertex)
        for a, b in zip(seq.starts + seq.ends, mate.starts + mate.ends):
            residuals.append(Point2(-a.x, a.y).distance(b))
    return _check("mirror_symmetry", residuals, threshold=EPS_GEOM)


def construction_audit(body: Body2D) -> AuditReport:
    """Run every construction invariant on a built body; worst residual per check"""
    audits = [
        _paired_collinearity,
        _homothety_transport,
        _vertex_tangency,
        _rail_membership,
        _vanishing_lengths,
        _containment,
        _confocal_crossing,
    ]
    if not body.params.asymmetric:
        audits.append(_mirror_symmetry)
    checks = []
    for audit in audits:
        try:
            checks.append(audit(body))
        except KernelError as exc:
            name = audit.__name__.lstrip("_")
            logger.warning("audit %s could not run: %s", name, exc.detail)
            checks.append(AuditCheck(name=name, worst_residual=math.inf, threshold=TAU_AUDIT, samples=0, passed=False, detail=exc.detail))
    report = AuditReport(depth=body.depth, checks=checks, passed=all(c.passed for c in checks))
    for check in checks:
        logger.info("audit %s: worst %.3g over %d samples", check.name, check.worst_residual, check.samples)
    return report
