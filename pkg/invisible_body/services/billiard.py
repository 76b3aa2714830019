"""
Specular billiard in the complement of a Body2D.

Rays live in the body's normalized frame. Each step takes the nearest
forward crossing over all pieces, reflects about the normal there and
advances the origin by EPS_T.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import List, Optional, Sequence, Tuple

from ..core.conics import normal_at, ray_conic_hits
from ..core.const import EPS_END, EPS_GRAZE, EPS_T, MAX_BOUNCES
from ..core.errors import InsideBody, NotExited
from ..core.geometry import Dir2, Line2, Point2, Ray2, angle_between, collinearity_residual, point_in_polygon, ray_segment_hit, reflect_dir
from ..models.construction import Body2D, Piece, PieceKind
from ..models.trace import DeviationMetrics, Hit, TraceResult, TraceStatus
from .construction import pair_of

logger = logging.getLogger(__name__)

# Distance the reversed ray starts beyond the last bounce point
REVERSE_BACKOFF = 10.0


def inside_body(p: Point2, body: Body2D) -> bool:
    """True when p lies inside one of the four quadrangles"""
    return any(point_in_polygon(p, quad.outline) for quad in body.quads)


def _piece_hit(ray: Ray2, piece: Piece) -> Optional[Tuple[float, Point2]]:
    if piece.kind is PieceKind.ARC:
        for t, p in ray_conic_hits(ray, piece.arc):
            if t >= EPS_T:
                return t, p
        return None
    hit = ray_segment_hit(ray, piece.segment)
    if hit is None or hit[0] < EPS_T:
        return None
    return hit[0], ray.at(hit[0])


def _normal(piece: Piece, p: Point2) -> Dir2:
    if piece.kind is PieceKind.ARC:
        return normal_at(piece.arc.conic, p)
    return Dir2.between(piece.segment.a, piece.segment.b).perp()


def first_hit(ray: Ray2, body: Body2D, check_inside: bool = True) -> Optional[Hit]:
    """Nearest forward crossing of the ray with the body boundary, None on escape"""
    if check_inside and inside_body(ray.origin, body):
        raise InsideBody(f"ray origin ({ray.origin.x}, {ray.origin.y}) is inside the body")

    best: Optional[Tuple[float, Point2, Piece]] = None
    for piece in body.pieces:
        to_center = piece.center - ray.origin
        along = ray.dir.dot(to_center)
        if along < -piece.radius or abs(ray.dir.cross(to_center)) > piece.radius:
            continue
        if best is not None and along - piece.radius > best[0]:
            continue
        found = _piece_hit(ray, piece)
        if found is not None and (best is None or found[0] < best[0]):
            best = (found[0], found[1], piece)

    if best is None:
        return None
    t, p, piece = best
    normal = _normal(piece, p)
    if normal.dot(ray.dir) > 0.0:
        normal = -normal
    a, b = piece.endpoints
    degenerate = min(p.distance(a), p.distance(b)) < EPS_END or abs(ray.dir.dot(normal)) < EPS_GRAZE
    return Hit(t=t, point=p, piece=piece, normal=normal, degenerate=degenerate)


def trace(ray: Ray2, body: Body2D, max_bounces: int = MAX_BOUNCES) -> TraceResult:
    """Follow a ray through reflections until it escapes, grazes, or runs out of bounces"""
    bounces: List[Hit] = []
    current = ray
    while True:
        hit = first_hit(current, body, check_inside=not bounces)
        if hit is None:
            exit_ray = ray if not bounces else Ray2(bounces[-1].point, current.dir)
            return TraceResult(initial=ray, bounces=tuple(bounces), exit=exit_ray, status=TraceStatus.EXITED)
        if len(bounces) >= max_bounces:
            logger.warning("ray at %.15g rad ran out of bounces", ray.dir.angle)
            return TraceResult(initial=ray, bounces=tuple(bounces), exit=None, status=TraceStatus.MAX_BOUNCES)
        bounces.append(hit)
        if hit.degenerate:
            logger.debug("degenerate hit on %s at (%.12g, %.12g)", hit.piece.label, hit.point.x, hit.point.y)
            return TraceResult(initial=ray, bounces=tuple(bounces), exit=None, status=TraceStatus.DEGENERATE_HIT)
        d = reflect_dir(current.dir, hit.normal)
        current = Ray2(hit.point + d * EPS_T, d)


def exit_deviation(source: Point2, tr: TraceResult) -> DeviationMetrics:
    if tr.status is not TraceStatus.EXITED:
        raise NotExited(f"trace ended with status {tr.status.value}", status=tr.status.value)
    exit_line = Line2(tr.exit.origin, tr.exit.dir)
    initial_line = Line2(tr.initial.origin, tr.initial.dir)
    return DeviationMetrics(
        angle=angle_between(tr.initial.dir, tr.exit.dir),
        source_distance=exit_line.distance(source),
        line_offset=initial_line.distance(tr.exit.origin),
    )


def reverse_ray(tr: TraceResult) -> Ray2:
    """Incoming ray of the time-reversed trace"""
    if tr.status is not TraceStatus.EXITED:
        raise NotExited(f"trace ended with status {tr.status.value}", status=tr.status.value)
    d = -tr.exit.dir
    return Ray2(tr.exit.origin - d * REVERSE_BACKOFF, d)


def focal_line_residuals(tr: TraceResult, body: Body2D) -> Optional[Tuple[float, float, float]]:
    """
    For a four-bounce trace, how far the three inner legs miss the
    ellipse rail focus, the source and the hyperbola rail focus.
    """
    if len(tr.bounces) != 4 or tr.bounces[0].piece.sequence is None:
        return None
    ellipse, hyperbola = pair_of(body, tr.bounces[0].piece.sequence)
    p1, p2, p3, p4 = tr.bounce_points
    return (
        collinearity_residual(p1, p2, ellipse.rail_focus),
        collinearity_residual(p2, p3, ellipse.source),
        collinearity_residual(p3, p4, hyperbola.rail_focus),
    )


def _trace_chunk(body: Body2D, max_bounces: int, rays: Sequence[Ray2]) -> List[TraceResult]:
    return [trace(ray, body, max_bounces) for ray in rays]


def trace_many(rays: Sequence[Ray2], body: Body2D, workers: int = 1, max_bounces: int = MAX_BOUNCES) -> List[TraceResult]:
    """Trace independent rays, in a process pool when workers > 1; order is preserved"""
    rays = list(rays)
    if workers <= 1 or len(rays) < 2:
        return _trace_chunk(body, max_bounces, rays)
    size = -(-len(rays) // (workers * 4))
    chunks = [rays[i:i + size] for i in range(0, len(rays), size)]
    results: List[TraceResult] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(partial(_trace_chunk, body, max_bounces), chunks):
            results.extend(part)
    return results
