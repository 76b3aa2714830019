"""
SVG figures of a body and of ray traces, in the body's normalized frame.

Coordinates are flipped to y-down when written, so the figure reads
y-up, and every number is printed with 9 significant digits.
"""
import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import svgwrite

from ..core.conics import ConicArc, ConicKind
from ..core.geometry import Point2, Ray2
from ..models.construction import Body2D, PieceKind
from ..models.trace import TraceResult
from ..schemas.render import SceneStyle
from .construction import named_points

logger = logging.getLogger(__name__)

MAX_REFINE = 12

Box = Tuple[float, float, float, float]


def fmt(value: float) -> str:
    text = f"{value:.9g}"
    return "0" if text == "-0" else text


def _xy(p: Point2) -> str:
    return f"{fmt(p.x)},{fmt(-p.y)}"


def _path_d(points: Sequence[Point2], closed: bool = False) -> str:
    d = "M" + _xy(points[0]) + "".join(" L" + _xy(p) for p in points[1:])
    return d + " Z" if closed else d


def arc_polyline(arc: ConicArc, samples: int, tolerance: float) -> List[Point2]:
    """Polar-angle samples of an arc, bisected until every chord is within tolerance"""
    step = arc.span / samples
    angles = [arc.theta_min + i * step for i in range(samples + 1)]
    points = [arc.point_at(t) for t in angles]
    out = [points[0]]
    for i in range(samples):
        out.extend(_refine(arc, angles[i], angles[i + 1], points[i], points[i + 1], tolerance, 0))
    return out


def _refine(arc: ConicArc, t0: float, t1: float, p0: Point2, p1: Point2, tolerance: float, level: int) -> List[Point2]:
    tm = 0.5 * (t0 + t1)
    pm = arc.point_at(tm)
    chord = p1 - p0
    length = chord.norm()
    sag = abs(chord.cross(pm - p0)) / length if length > 0.0 else pm.distance(p0)
    if sag <= tolerance or level >= MAX_REFINE:
        return [p1]
    return _refine(arc, t0, tm, p0, pm, tolerance, level + 1) + _refine(arc, tm, t1, pm, p1, tolerance, level + 1)


def _extent(points: Iterable[Point2]) -> Box:
    xs, ys = [], []
    for p in points:
        xs.append(p.x)
        ys.append(p.y)
    return min(xs), min(ys), max(xs), max(ys)


def scene_box(body: Body2D, style: SceneStyle) -> Box:
    """Padded y-up bounding box of the body, its named points and both sources"""
    points: List[Point2] = list(named_points(body.params, body.points).values())
    for piece in body.pieces:
        points.extend(piece.endpoints)
        if piece.arc is not None:
            points.extend(piece.arc.sample(16))
    x0, y0, x1, y1 = _extent(points)
    pad = style.padding * max(x1 - x0, y1 - y0)
    return x0 - pad, y0 - pad, x1 + pad, y1 + pad


def clip_ray(ray: Ray2, box: Box) -> Optional[Point2]:
    """Point where a ray leaves the box (Liang-Barsky), None if it never is inside"""
    x0, y0, x1, y1 = box
    t_enter, t_leave = 0.0, math.inf
    for p, q in (
        (-ray.dir.x, ray.origin.x - x0),
        (ray.dir.x, x1 - ray.origin.x),
        (-ray.dir.y, ray.origin.y - y0),
        (ray.dir.y, y1 - ray.origin.y),
    ):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        t = q / p
        if p < 0.0:
            t_enter = max(t_enter, t)
        else:
            t_leave = min(t_leave, t)
    if t_enter > t_leave or math.isinf(t_leave):
        return None
    return ray.at(t_leave)


def trace_vertices(tr: TraceResult, box: Box) -> List[Point2]:
    """Origin, bounce points and, for exited traces, the exit point on the box edge"""
    vertices = [tr.initial.origin, *tr.bounce_points]
    if tr.exit is not None:
        edge = clip_ray(tr.exit, box)
        if edge is not None:
            vertices.append(edge)
    return vertices


def render_svg(body: Body2D, traces: Sequence[TraceResult] = (), style: Optional[SceneStyle] = None) -> str:
    """SVG 1.1 document of the body with the traces drawn over it"""
    style = style or SceneStyle()
    box = scene_box(body, style)
    x0, y0, x1, y1 = box
    width, height = x1 - x0, y1 - y0
    tolerance = style.sagitta * max(width, height)

    dwg = svgwrite.Drawing(
        size=(f"{style.width_px}px", f"{int(round(style.width_px * height / width))}px"),
        profile="full",
        debug=False,
    )
    dwg["viewBox"] = " ".join(fmt(v) for v in (x0, -y1, width, height))

    arrow = dwg.marker(id="arrow", insert=(5, 5), size=(10, 10), orient="auto", markerUnits="strokeWidth")
    arrow["viewBox"] = "0 0 10 10"
    arrow.add(dwg.path(d="M0,0 L10,5 L0,10 Z", fill=style.color("ray")))
    dwg.defs.add(arrow)

    quads = dwg.add(dwg.g(id="quadrangles", fill=style.color("quad"), stroke="none"))
    for quad in body.quads:
        quads.add(dwg.path(d=_path_d(quad.outline, closed=True), id=f"quad-{quad.vertex.value}"))

    if style.rails:
        rails = dwg.add(dwg.g(
            id="rails", fill="none", stroke=style.color("rail"),
            stroke_width=fmt(style.rail_width), stroke_dasharray=f"{fmt(4 * style.rail_width)},{fmt(3 * style.rail_width)}",
        ))
        for seq in body.sequences:
            for rail in (seq.rails.vertex_rail, seq.rails.clip_rail):
                rails.add(dwg.path(d=_path_d([rail.a, rail.b])))

    pieces = dwg.add(dwg.g(id="pieces", fill="none", stroke_linecap="round"))
    for piece in body.pieces:
        if piece.kind is PieceKind.ARC:
            color = style.color("ellipse" if piece.arc.conic.kind is ConicKind.ELLIPSE else "hyperbola")
            points = arc_polyline(piece.arc, style.arc_samples, tolerance)
            stroke_width = style.arc_width
        else:
            color = style.color("segment")
            points = [piece.segment.a, piece.segment.b]
            stroke_width = style.segment_width
        pieces.add(dwg.path(
            d=_path_d(points), id=f"piece-{piece.index}", stroke=color, stroke_width=fmt(stroke_width),
        ))

    rays = dwg.add(dwg.g(id="traces", fill="none", stroke=style.color("ray"), stroke_width=fmt(style.ray_width)))
    for i, tr in enumerate(traces):
        path = dwg.path(d=_path_d(trace_vertices(tr, box)), id=f"trace-{i}")
        path["marker-end"] = arrow.get_funciri()
        path["data-status"] = tr.status.value
        rays.add(path)

    marks = dwg.add(dwg.g(id="points", fill=style.color("point")))
    named = named_points(body.params, body.points)
    for name, p in named.items():
        marks.add(dwg.circle(center=(fmt(p.x), fmt(-p.y)), r=fmt(style.point_radius)))
    if style.labels:
        labels = dwg.add(dwg.g(id="labels", font_family="serif", font_size=fmt(style.font_size)))
        offset = 1.5 * style.point_radius
        for name, p in named.items():
            labels.add(dwg.text(name, insert=(fmt(p.x + offset), fmt(-p.y - offset))))

    logger.info("rendered %d pieces and %d traces", len(body.pieces), len(traces))
    return dwg.tostring()
