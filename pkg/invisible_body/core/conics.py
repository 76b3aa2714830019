"""
Confocal conics in focal form.

A conic is stored as its two foci and its focal constant k:

* ellipse:          |p f1| + |p f2| = k
* hyperbola branch: |p f_far| - |p f_near| = k, the branch around f_near

The implicit quadratic is only formed inside ray intersection; every
"lies on" decision goes back to the focal equation. Arcs are measured
by polar angle about one of the two foci (the pivot), where the focal
polar form gives the radius in closed form.
"""
import enum
import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import List, Optional, Tuple

from scipy import integrate, optimize

from .const import EPS_ANGLE, EPS_DOUBLE_ROOT, EPS_GEOM, EPS_T, TAU
from .errors import DegenerateConic, NoIntersection, OffCurve, OutOfExtent
from .geometry import Dir2, Point2, Ray2, polar_angle, wrap_angle

logger = logging.getLogger(__name__)


class ConicKind(str, enum.Enum):
    ELLIPSE = "ellipse"
    HYPERBOLA_BRANCH = "hyperbola_branch"


@dataclass(frozen=True)
class Conic:
    kind: ConicKind
    f1: Point2
    f2: Point2
    k: float
    branch_focus: Optional[Point2] = None

    def __post_init__(self):
        w = self.f1.distance(self.f2)
        if w <= 0.0:
            raise DegenerateConic("foci coincide")
        if self.kind is ConicKind.ELLIPSE:
            if not self.k > w:
                raise DegenerateConic(f"ellipse needs k > |f1f2| ({self.k} <= {w})")
        else:
            if self.branch_focus not in (self.f1, self.f2):
                raise DegenerateConic("hyperbola branch focus must be one of the foci")
            if not 0.0 < self.k < w:
                raise DegenerateConic(f"hyperbola branch needs 0 < k < |f1f2| (k={self.k}, w={w})")

    @property
    def is_ellipse(self) -> bool:
        return self.kind is ConicKind.ELLIPSE

    @cached_property
    def foci_distance(self) -> float:
        return self.f1.distance(self.f2)

    @property
    def near_focus(self) -> Point2:
        return self.branch_focus if self.branch_focus is not None else self.f1

    @property
    def far_focus(self) -> Point2:
        return self.other_focus(self.near_focus)

    @property
    def tolerance(self) -> float:
        return EPS_GEOM * max(1.0, self.k)

    def other_focus(self, focus: Point2) -> Point2:
        if focus == self.f1:
            return self.f2
        if focus == self.f2:
            return self.f1
        raise ValueError(f"{focus} is not a focus of this conic")

    def focal_value(self, p: Point2) -> float:
        """Signed focal equation: zero on the curve"""
        if self.is_ellipse:
            return p.distance(self.f1) + p.distance(self.f2) - self.k
        return p.distance(self.far_focus) - p.distance(self.near_focus) - self.k

    def with_constant(self, k: float) -> "Conic":
        return replace(self, k=k)

    @cached_property
    def implicit(self) -> Tuple[float, float, float, float, float, float, float]:
        """(cx, cy, ex, ey, P, Q, R) with P x'^2 + Q y'^2 = R in the axis frame"""
        cx = 0.5 * (self.f1.x + self.f2.x)
        cy = 0.5 * (self.f1.y + self.f2.y)
        w = self.foci_distance
        ex, ey = (self.f2.x - self.f1.x) / w, (self.f2.y - self.f1.y) / w
        a2 = 0.25 * self.k * self.k
        c2 = 0.25 * w * w
        big_p = a2 - c2
        return cx, cy, ex, ey, big_p, a2, a2 * big_p


def conic_through(
    kind: ConicKind,
    f1: Point2,
    f2: Point2,
    p: Point2,
    branch_focus: Optional[Point2] = None,
) -> Conic:
    """Member of the confocal family (f1, f2) of the given kind passing through p"""
    d1, d2 = p.distance(f1), p.distance(f2)
    w = f1.distance(f2)
    scale = max(1.0, w)
    if min(d1, d2) <= EPS_GEOM * scale:
        raise DegenerateConic("point coincides with a focus")
    if kind is ConicKind.ELLIPSE:
        k = d1 + d2
        if k - w <= EPS_GEOM * scale:
            raise DegenerateConic("point lies on the segment between the foci")
        return Conic(kind, f1, f2, k)
    if branch_focus not in (f1, f2):
        raise DegenerateConic("hyperbola branch focus must be one of the foci")
    near, far = (d1, d2) if branch_focus == f1 else (d2, d1)
    k = far - near
    if k <= EPS_GEOM * scale:
        raise DegenerateConic("point is not on the branch around the given focus")
    if w - k <= EPS_GEOM * scale:
        raise DegenerateConic("point lies on the focal line outside the foci")
    return Conic(kind, f1, f2, k, branch_focus)


def focal_residual(c: Conic, p: Point2) -> float:
    """|focal equation| at p; inf when p is on the other hyperbola branch"""
    if c.is_ellipse:
        return abs(p.distance(c.f1) + p.distance(c.f2) - c.k)
    diff = p.distance(c.far_focus) - p.distance(c.near_focus)
    if diff < 0.0:
        return math.inf
    return abs(diff - c.k)


def normal_at(c: Conic, p: Point2) -> Dir2:
    """Unit normal pointing away from the convex set the curve bounds"""
    if focal_residual(c, p) >= c.tolerance:
        raise OffCurve(f"point ({p.x}, {p.y}) is not on the {c.kind.value}")
    return _gradient_dir(c, p.x, p.y)


def tangent_at(c: Conic, p: Point2) -> Dir2:
    return normal_at(c, p).perp()


def _gradient_dir(c: Conic, x: float, y: float) -> Dir2:
    if c.is_ellipse:
        a, b = c.f1, c.f2
        sign = 1.0
    else:
        a, b = c.near_focus, c.far_focus
        sign = -1.0
    ax, ay = x - a.x, y - a.y
    na = math.hypot(ax, ay)
    bx, by = x - b.x, y - b.y
    nb = math.hypot(bx, by)
    gx = ax / na + sign * bx / nb
    gy = ay / na + sign * by / nb
    g = math.hypot(gx, gy)
    return Dir2(gx / g, gy / g)


# Focal polar form

def _polar_terms(c: Conic, pivot: Point2) -> Tuple[float, float, float, float, float]:
    """(dx, dy, numerator, alpha, beta) with r = numerator / (alpha + beta * u.d)"""
    other = c.other_focus(pivot)
    dx, dy = pivot.x - other.x, pivot.y - other.y
    w2 = dx * dx + dy * dy
    k = c.k
    if c.is_ellipse:
        return dx, dy, k * k - w2, 2.0 * k, 2.0
    if pivot == c.near_focus:
        return dx, dy, w2 - k * k, 2.0 * k, -2.0
    return dx, dy, w2 - k * k, -2.0 * k, -2.0


def polar_radius(c: Conic, pivot: Point2, theta: float) -> Optional[float]:
    """Distance from pivot to the curve along angle theta; None when the ray misses"""
    dx, dy, num, alpha, beta = _polar_terms(c, pivot)
    den = alpha + beta * (math.cos(theta) * dx + math.sin(theta) * dy)
    if den <= 0.0:
        return None
    return num / den


def polar_point(c: Conic, pivot: Point2, theta: float) -> Optional[Point2]:
    r = polar_radius(c, pivot, theta)
    if r is None:
        return None
    return Point2(pivot.x + r * math.cos(theta), pivot.y + r * math.sin(theta))


@dataclass(frozen=True)
class ConicArc:
    """Piece of a conic between two polar angles about one of its foci"""

    conic: Conic
    pivot: Point2
    theta_min: float
    theta_max: float

    def __post_init__(self):
        self.conic.other_focus(self.pivot)
        if not self.theta_max > self.theta_min:
            raise OutOfExtent("arc extent must satisfy theta_min < theta_max")
        if self.theta_max - self.theta_min >= TAU:
            raise OutOfExtent("arc extent must be shorter than a full turn")
        for theta in (self.theta_min, 0.5 * (self.theta_min + self.theta_max), self.theta_max):
            p = polar_point(self.conic, self.pivot, theta)
            if p is None or focal_residual(self.conic, p) >= self.conic.tolerance:
                raise OutOfExtent(f"polar angle {theta} does not reach the {self.conic.kind.value}")

    @classmethod
    def between(cls, conic: Conic, pivot: Point2, p: Point2, q: Point2) -> "ConicArc":
        """The shorter arc with endpoints p and q"""
        tp, tq = polar_angle(p, pivot), polar_angle(q, pivot)
        span = wrap_angle(tq - tp)
        if span > math.pi:
            tp, span = tq, TAU - span
        return cls(conic, pivot, tp, tp + span)

    @property
    def span(self) -> float:
        return self.theta_max - self.theta_min

    @cached_property
    def start(self) -> Point2:
        return polar_point(self.conic, self.pivot, self.theta_min)

    @cached_property
    def end(self) -> Point2:
        return polar_point(self.conic, self.pivot, self.theta_max)

    @property
    def midpoint(self) -> Point2:
        return polar_point(self.conic, self.pivot, 0.5 * (self.theta_min + self.theta_max))

    def contains_angle(self, theta: float) -> bool:
        offset = wrap_angle(theta - self.theta_min)
        return offset <= self.span + EPS_ANGLE or offset >= TAU - EPS_ANGLE

    def contains(self, p: Point2) -> bool:
        return self.contains_angle(polar_angle(p, self.pivot))

    def point_at(self, theta: float) -> Point2:
        """Point of the arc at polar angle theta about the pivot"""
        if not self.contains_angle(theta):
            raise OutOfExtent(f"angle {theta} outside [{self.theta_min}, {self.theta_max}]")
        p = polar_point(self.conic, self.pivot, theta)
        if p is None:
            raise OutOfExtent(f"polar angle {theta} does not reach the {self.conic.kind.value}")
        return p

    def sample(self, n: int) -> List[Point2]:
        """n + 1 points, evenly spaced in polar angle"""
        step = self.span / n
        return [self.point_at(self.theta_min + i * step) for i in range(n + 1)]

    @cached_property
    def bounding_circle(self) -> Tuple[Point2, float]:
        pts = self.sample(64)
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        center = Point2(0.5 * (min(xs) + max(xs)), 0.5 * (min(ys) + max(ys)))
        chord = max(pts[i].distance(pts[i + 1]) for i in range(len(pts) - 1))
        return center, max(center.distance(p) for p in pts) + chord

    def length(self) -> float:
        return arc_length(self)

    def with_conic(self, conic: Conic) -> "ConicArc":
        return ConicArc(conic, self.pivot, self.theta_min, self.theta_max)


def arc_length(arc: ConicArc) -> float:
    dx, dy, num, alpha, beta = _polar_terms(arc.conic, arc.pivot)

    def speed(theta: float) -> float:
        c, s = math.cos(theta), math.sin(theta)
        den = alpha + beta * (c * dx + s * dy)
        r = num / den
        dr = -num * beta * (-s * dx + c * dy) / (den * den)
        return math.hypot(r, dr)

    value, _ = integrate.quad(speed, arc.theta_min, arc.theta_max, epsabs=1e-13, epsrel=1e-12)
    return value


# Ray intersection

def ray_conic_intersections(ray: Ray2, conic: Conic) -> List[Tuple[float, Point2]]:
    """Forward crossings of a ray with the whole ellipse or hyperbola branch"""
    cx, cy, ex, ey, big_p, big_q, big_r = conic.implicit
    ox, oy = ray.origin.x - cx, ray.origin.y - cy
    dx, dy = ray.dir.x, ray.dir.y
    # axis frame
    px = ox * ex + oy * ey
    py = -ox * ey + oy * ex
    ux = dx * ex + dy * ey
    uy = -dx * ey + dy * ex
    qa = big_p * ux * ux + big_q * uy * uy
    qb = 2.0 * (big_p * px * ux + big_q * py * uy)
    qc = big_p * px * px + big_q * py * py - big_r

    roots: List[float] = []
    norm = max(abs(big_p), big_q)
    if abs(qa) < EPS_DOUBLE_ROOT * norm:
        # direction along an asymptote
        if qb != 0.0:
            roots.append(-qc / qb)
    else:
        disc = qb * qb - 4.0 * qa * qc
        if abs(disc) < EPS_DOUBLE_ROOT * max(1.0, qb * qb, abs(4.0 * qa * qc)):
            roots.append(-qb / (2.0 * qa))
        elif disc > 0.0:
            q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
            roots.append(q / qa)
            if q != 0.0:
                roots.append(qc / q)

    hits: List[Tuple[float, Point2]] = []
    tol = conic.tolerance
    for t in sorted(roots):
        t = _refine(conic, ray, t)
        if t < EPS_T:
            continue
        p = ray.at(t)
        if focal_residual(conic, p) >= tol:
            continue
        if hits and abs(hits[-1][0] - t) < EPS_T:
            continue
        hits.append((t, p))
    hits.sort(key=lambda h: h[0])
    return hits


def _refine(conic: Conic, ray: Ray2, t: float) -> float:
    """Two Newton steps on the focal equation along the ray"""
    for _ in range(2):
        x = ray.origin.x + t * ray.dir.x
        y = ray.origin.y + t * ray.dir.y
        p = Point2(x, y)
        g = conic.focal_value(p)
        if g == 0.0:
            break
        if conic.is_ellipse:
            a, b, sign = conic.f1, conic.f2, 1.0
        else:
            a, b, sign = conic.far_focus, conic.near_focus, -1.0
        na = math.hypot(x - a.x, y - a.y)
        nb = math.hypot(x - b.x, y - b.y)
        if na == 0.0 or nb == 0.0:
            break
        dg = (ray.dir.x * (x - a.x) + ray.dir.y * (y - a.y)) / na + sign * (
            ray.dir.x * (x - b.x) + ray.dir.y * (y - b.y)
        ) / nb
        if abs(dg) < 1e-8:
            break
        step = g / dg
        if abs(step) > 1e-6 * max(1.0, abs(t)):
            break
        t -= step
    return t


def ray_conic_hits(ray: Ray2, arc: ConicArc) -> List[Tuple[float, Point2]]:
    """Forward crossings of a ray with an arc, ascending in t"""
    return [(t, p) for t, p in ray_conic_intersections(ray, arc.conic) if arc.contains(p)]


# Confocal pairs

def confocal_crossing(ellipse: Conic, branch: Conic, side: Point2) -> Point2:
    """
    Crossing of a confocal ellipse and hyperbola branch on the given side
    of their focal axis.

    The ellipse is walked by polar angle about the branch's near focus,
    starting on the axis away from the far focus; the branch residual
    changes sign exactly once on each half-turn.
    """
    if {ellipse.f1, ellipse.f2} != {branch.f1, branch.f2}:
        raise NoIntersection("conics are not confocal")
    near, far = branch.near_focus, branch.far_focus
    axis = math.atan2(near.y - far.y, near.x - far.x)
    sign = 1.0 if (near - far).cross(side - far) >= 0.0 else -1.0

    def residual(s: float) -> float:
        p = polar_point(ellipse, near, axis + sign * s)
        return p.distance(far) - p.distance(near) - branch.k

    lo, hi = residual(0.0), residual(math.pi)
    if lo * hi > 0.0:
        raise NoIntersection("ellipse and hyperbola branch do not cross")
    s = optimize.brentq(residual, 0.0, math.pi, xtol=1e-15, maxiter=200)
    return polar_point(ellipse, near, axis + sign * s)
