"""
Bodies of revolution about the line A1A2.

A ray leaving a point of the axis stays in the meridian half-plane that
contains it, so 3D traces reduce to planar ones: rotate the ray into the
base half-plane, trace it there and rotate the result back.
"""
import logging
import math
from typing import List, Optional, TextIO, Tuple

import numpy as np

from ..config import settings
from ..core.conics import normal_at
from ..core.const import DELTA_CONE, EPS_GEOM, TAU, TAU_INV
from ..core.errors import DomainError, NotExited, OutsideRevolvedRange
from ..core.geometry import Dir2, Point2, Ray2, wrap_angle
from ..models.construction import PieceKind, Source
from ..models.revolve import Body3D, Point3, Ray3, TraceResult3, TriangleMesh
from ..models.trace import DeviationMetrics, TraceResult, TraceStatus
from ..schemas.report import SweepReport
from .billiard import trace, trace_many
from .verify import handled_cone, sample_directions, summarize_sweep

logger = logging.getLogger(__name__)

AXIS = np.array([1.0, 0.0, 0.0])


def rotation_matrices(thetas: np.ndarray, axis: np.ndarray = AXIS) -> np.ndarray:
    """Rodrigues rotation matrices about a unit axis, one per angle"""
    outer = np.outer(axis, axis)
    skew = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ])
    c = np.cos(thetas)[:, None, None]
    s = np.sin(thetas)[:, None, None]
    return c * np.eye(3) + s * skew + (1.0 - c) * outer


def lift(p: Point2, theta: float) -> Point3:
    """Point of the base plane rotated about the axis by theta"""
    return Point3(p.x, p.y * math.cos(theta), p.y * math.sin(theta))


def revolution_steps(body: Body3D, n_theta: int) -> int:
    """Angular steps of a range when a full turn takes n_theta"""
    return max(1, math.ceil(n_theta * body.span / TAU - 1e-9))


def _profile(piece, n_arc: int) -> List[Point2]:
    if piece.kind is PieceKind.ARC:
        return piece.arc.sample(n_arc)
    return [piece.segment.point_at(i / n_arc) for i in range(n_arc + 1)]


def _outward(body: Body3D, piece, p: Point2) -> Point2:
    if piece.kind is PieceKind.ARC:
        return normal_at(piece.arc.conic, p)
    n = Dir2.between(piece.segment.a, piece.segment.b).perp()
    vertex = body.base.quad(piece.quad).outline[0]
    return -n if n.dot(vertex - p) > 0.0 else n


def revolve_mesh(body: Body3D, n_theta: int, n_arc: int) -> TriangleMesh:
    """Triangulated surfaces of revolution of every boundary piece"""
    if n_theta < 3 or n_arc < 2:
        raise DomainError(f"mesh resolution too low (n_theta={n_theta}, n_arc={n_arc})")
    steps = revolution_steps(body, n_theta)
    theta0, theta1 = body.angular_range
    rotations = rotation_matrices(np.linspace(theta0, theta1, steps + 1))
    ring = n_arc + 1

    vertices, faces, groups = [], [], []
    offset = face_offset = 0
    for piece in body.base.pieces:
        profile = _profile(piece, n_arc)
        planar = np.array([[p.x, p.y, 0.0] for p in profile])
        # (steps + 1) rings of profile points
        rings = np.einsum("kij,nj->kni", rotations, planar).reshape(-1, 3)

        quads = []
        for j in range(steps):
            for i in range(n_arc):
                a = offset + j * ring + i
                b, c = a + 1, a + ring
                quads.append((a, c, b))
                quads.append((b, c, c + 1))
        tris = np.array(quads, dtype=np.int64)

        # arcs face away from the convex side of their conic, segments away from their quadrangle
        mid = n_arc // 2
        p0, pc, pb = (rings[k - offset] for k in tris[2 * mid])
        facing = np.cross(pc - p0, pb - p0)
        out2 = _outward(body, piece, profile[mid])
        out3 = rotations[0] @ np.array([out2.x, out2.y, 0.0])
        if float(np.dot(facing, out3)) < 0.0:
            tris = tris[:, [0, 2, 1]]

        vertices.append(rings)
        faces.append(tris)
        groups.append((piece.index, offset, offset + len(rings), face_offset, face_offset + len(tris)))
        offset += len(rings)
        face_offset += len(tris)

    mesh = TriangleMesh(vertices=np.vstack(vertices), faces=np.vstack(faces), groups=tuple(groups))
    logger.info("mesh: %d vertices, %d triangles over %d steps", mesh.vertex_count, mesh.face_count, steps)
    return mesh


def write_obj(mesh: TriangleMesh, stream: TextIO) -> None:
    """ASCII OBJ, one object per piece, positions only"""
    stream.write("# invisible body of revolution\n")
    for index, v_start, v_end, f_start, f_end in mesh.groups:
        stream.write(f"o piece_{index}\n")
        for x, y, z in mesh.vertices[v_start:v_end]:
            stream.write(f"v {x:.12g} {y:.12g} {z:.12g}\n")
        for a, b, c in mesh.faces[f_start:f_end]:
            stream.write(f"f {a + 1} {b + 1} {c + 1}\n")


# Meridian reduction

def meridian_reduce(ray: Ray3, body: Body3D) -> Tuple[Ray2, float]:
    """Planar ray in the base half-plane and the meridian angle it was rotated from"""
    p = body.base.params
    origin = Point2(ray.origin.x, 0.0)
    if abs(ray.origin.y) > EPS_GEOM or abs(ray.origin.z) > EPS_GEOM or min(
        origin.distance(p.A1), origin.distance(p.A2)
    ) > EPS_GEOM:
        raise DomainError("3D rays must start at A1 or A2")
    rho = math.hypot(ray.dir.y, ray.dir.z)
    if rho == 0.0:
        theta = body.angular_range[0]
    else:
        phi = math.atan2(ray.dir.z, ray.dir.y)
        theta = wrap_angle(phi if body.side > 0.0 else phi - math.pi)
    if not body.full_turn:
        lo, hi = body.angular_range
        if not lo + DELTA_CONE <= theta <= hi - DELTA_CONE:
            raise OutsideRevolvedRange(f"meridian angle {theta} is outside [{lo}, {hi}]", meridian=theta)
    planar = Ray2(p.A1 if origin.distance(p.A1) <= EPS_GEOM else p.A2, Dir2.of(Point2(ray.dir.x, body.side * rho)))
    return planar, theta


def _lift_trace(ray: Ray3, theta: float, planar: TraceResult) -> TraceResult3:
    exit_ray = None
    if planar.exit is not None:
        exit_ray = Ray3(lift(planar.exit.origin, theta), lift(planar.exit.dir, theta).unit())
    return TraceResult3(
        initial=ray,
        bounces=tuple(lift(p, theta) for p in planar.bounce_points),
        exit=exit_ray,
        status=planar.status,
        meridian=theta,
        planar=planar,
    )


def trace3d(ray: Ray3, body: Body3D) -> TraceResult3:
    """Trace a ray from A1 or A2 through the body of revolution"""
    planar_ray, theta = meridian_reduce(ray, body)
    return _lift_trace(ray, theta, trace(planar_ray, body.base))


def exit_deviation3(source: Point3, tr: TraceResult3) -> DeviationMetrics:
    if tr.status is not TraceStatus.EXITED:
        raise NotExited(f"trace ended with status {tr.status.value}", status=tr.status.value)
    d0, d1 = tr.initial.dir, tr.exit.dir
    angle = math.atan2(d0.cross(d1).norm(), d0.dot(d1))
    return DeviationMetrics(
        angle=angle,
        source_distance=(source - tr.exit.origin).cross(d1).norm(),
        line_offset=(tr.exit.origin - tr.initial.origin).cross(d0).norm(),
    )


def random_rays3(body: Body3D, source: Source, n_rays: int, seed: int) -> List[Ray3]:
    """Directions whose meridian lies in the range and whose planar angle lies in the handled cone"""
    rng = np.random.default_rng(seed)
    planar_angles = sample_directions(handled_cone(body.base, source), n_rays, rng)
    lo, hi = body.angular_range
    if not body.full_turn:
        lo, hi = lo + DELTA_CONE, hi - DELTA_CONE
    meridians = rng.uniform(lo, hi, size=len(planar_angles))
    origin2 = body.base.source_point(source)
    origin = Point3(origin2.x, 0.0, 0.0)
    return [
        Ray3(origin, lift(Dir2.from_angle(float(psi)), float(theta)).unit())
        for psi, theta in zip(planar_angles, meridians)
    ]


def revolved_sweep(
    body: Body3D,
    source: Source,
    n_rays: int,
    seed: int,
    workers: Optional[int] = None,
) -> SweepReport:
    """Sweep of random 3D rays through the meridian reduction, deviations measured in 3D"""
    rays = random_rays3(body, source, n_rays, seed)
    reduced = [meridian_reduce(ray, body) for ray in rays]
    planar = trace_many([r for r, _ in reduced], body.base, workers=workers if workers is not None else settings.WORKERS)
    traces = [_lift_trace(ray, theta, tr) for ray, (_, theta), tr in zip(rays, reduced, planar)]

    origin = rays[0].origin if rays else Point3(body.base.source_point(source).x, 0.0, 0.0)
    metrics = [exit_deviation3(origin, tr) for tr in traces if tr.status is TraceStatus.EXITED]
    report = summarize_sweep(body.base, source, n_rays, seed, planar)
    worst = [m.max for m in metrics]
    max_deviation = max(worst, default=0.0)
    logger.info("revolved sweep from %s: max deviation %.3g", source.value, max_deviation)
    return report.model_copy(update={
        "max_deviation": max_deviation,
        "mean_deviation": float(np.mean(worst)) if worst else 0.0,
        "max_angle": max((m.angle for m in metrics), default=0.0),
        "max_source_distance": max((m.source_distance for m in metrics), default=0.0),
        "max_line_offset": max((m.line_offset for m in metrics), default=0.0),
        "passed": report.passed and max_deviation < TAU_INV,
    })

