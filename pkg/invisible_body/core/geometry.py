"""
Planar primitives: points, unit directions, rays, lines and segments,
plus the handful of predicates the construction and the tracer are
written in terms of.

Everything here is a value type or a pure function.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .const import EPS_PARALLEL, EPS_SEGMENT, EPS_UNIT, TAU
from .errors import DomainError


@dataclass(frozen=True, slots=True)
class Point2:
    x: float
    y: float

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Point2":
        return Point2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Point2":
        return Point2(self.x / s, self.y / s)

    def __neg__(self) -> "Point2":
        return Point2(-self.x, -self.y)

    def dot(self, other: "Point2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def perp(self) -> "Point2":
        """Counter-clockwise quarter turn"""
        return Point2(-self.y, self.x)

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True, slots=True)
class Dir2(Point2):
    """Unit direction"""

    def __post_init__(self):
        if abs(math.hypot(self.x, self.y) - 1.0) > EPS_UNIT:
            raise DomainError(f"direction ({self.x}, {self.y}) is not unit-norm")

    @classmethod
    def of(cls, v: Point2) -> "Dir2":
        n = math.hypot(v.x, v.y)
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return cls(v.x / n, v.y / n)

    @classmethod
    def from_angle(cls, theta: float) -> "Dir2":
        return cls(math.cos(theta), math.sin(theta))

    @classmethod
    def between(cls, a: Point2, b: Point2) -> "Dir2":
        return cls.of(b - a)

    @property
    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    def perp(self) -> "Dir2":
        return Dir2(-self.y, self.x)

    def __neg__(self) -> "Dir2":
        return Dir2(-self.x, -self.y)


@dataclass(frozen=True, slots=True)
class Ray2:
    origin: Point2
    dir: Dir2

    def at(self, t: float) -> Point2:
        return Point2(self.origin.x + t * self.dir.x, self.origin.y + t * self.dir.y)

    @classmethod
    def through(cls, origin: Point2, target: Point2) -> "Ray2":
        return cls(origin, Dir2.between(origin, target))


@dataclass(frozen=True, slots=True)
class Line2:
    point: Point2
    dir: Dir2

    @classmethod
    def through(cls, a: Point2, b: Point2) -> "Line2":
        return cls(a, Dir2.between(a, b))

    def distance(self, p: Point2) -> float:
        return abs(self.dir.cross(p - self.point))

    def project(self, p: Point2) -> float:
        return self.dir.dot(p - self.point)


@dataclass(frozen=True, slots=True)
class Segment2:
    a: Point2
    b: Point2

    def __post_init__(self):
        if self.a.distance(self.b) <= EPS_SEGMENT:
            raise DomainError(f"segment endpoints coincide at ({self.a.x}, {self.a.y})")

    @property
    def length(self) -> float:
        return self.a.distance(self.b)

    @property
    def line(self) -> Line2:
        return Line2.through(self.a, self.b)

    def point_at(self, s: float) -> Point2:
        """s in [0, 1] runs from a to b"""
        return Point2(self.a.x + s * (self.b.x - self.a.x), self.a.y + s * (self.b.y - self.a.y))

    def parameter(self, p: Point2) -> float:
        d = self.b - self.a
        return d.dot(p - self.a) / d.dot(d)

    def distance(self, p: Point2) -> float:
        s = min(1.0, max(0.0, self.parameter(p)))
        return self.point_at(s).distance(p)


# Intersections

def line_params(p: Point2, u: Point2, q: Point2, v: Point2) -> Optional[Tuple[float, float]]:
    """Parameters (t, s) with p + t*u = q + s*v, or None when parallel"""
    c = u.x * v.y - u.y * v.x
    scale = math.hypot(u.x, u.y) * math.hypot(v.x, v.y)
    if scale == 0.0 or abs(c) < EPS_PARALLEL * scale:
        return None
    wx, wy = q.x - p.x, q.y - p.y
    t = (wx * v.y - wy * v.x) / c
    s = (wx * u.y - wy * u.x) / c
    return t, s


def intersect_through(a: Point2, b: Point2, c: Point2, d: Point2) -> Optional[Point2]:
    """Intersection of line ab with line cd"""
    params = line_params(a, b - a, c, d - c)
    if params is None:
        return None
    t, _ = params
    return Point2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))


def ray_segment_hit(ray: Ray2, seg: Segment2) -> Optional[Tuple[float, float]]:
    """Ray parameter t and segment parameter s of a crossing, s in [0, 1]"""
    params = line_params(ray.origin, ray.dir, seg.a, seg.b - seg.a)
    if params is None:
        return None
    t, s = params
    if s < 0.0 or s > 1.0:
        return None
    return t, s


# Reflection and similarity maps

def reflect_dir(d: Dir2, n: Dir2) -> Dir2:
    k = 2.0 * (d.x * n.x + d.y * n.y)
    rx, ry = d.x - k * n.x, d.y - k * n.y
    r = math.hypot(rx, ry)
    return Dir2(rx / r, ry / r)


def homothety(center: Point2, ratio: float, p: Point2) -> Point2:
    if not math.isfinite(ratio) or ratio == 0.0:
        raise DomainError(f"homothety ratio must be finite and nonzero, got {ratio}")
    return Point2(center.x + ratio * (p.x - center.x), center.y + ratio * (p.y - center.y))


def mirror_point(p: Point2, line: Line2) -> Point2:
    """Reflection of p across a line"""
    foot = line.point + line.dir * line.project(p)
    return Point2(2.0 * foot.x - p.x, 2.0 * foot.y - p.y)


def collinearity_residual(p: Point2, q: Point2, r: Point2) -> float:
    """Sine of the angle q-p-r; zero iff the three points are collinear"""
    ax, ay = q.x - p.x, q.y - p.y
    bx, by = r.x - p.x, r.y - p.y
    denom = max(math.hypot(ax, ay) * math.hypot(bx, by), 1e-300)
    return abs(ax * by - ay * bx) / denom


# Angles

def wrap_angle(theta: float) -> float:
    """Into [0, 2*pi)"""
    w = math.fmod(theta, TAU)
    if w < 0.0:
        w += TAU
    return 0.0 if w >= TAU else w


def polar_angle(p: Point2, about: Point2) -> float:
    return math.atan2(p.y - about.y, p.x - about.x)


def angle_between(d1: Point2, d2: Point2) -> float:
    """Unsigned angle in [0, pi]"""
    return math.atan2(abs(d1.cross(d2)), d1.dot(d2))


# Polygons

def polygon_area(poly: Sequence[Point2]) -> float:
    """Signed area, positive for counter-clockwise order"""
    area = 0.0
    for i, p in enumerate(poly):
        q = poly[(i + 1) % len(poly)]
        area += p.x * q.y - q.x * p.y
    return 0.5 * area


def convex_margin(p: Point2, poly: Sequence[Point2]) -> float:
    """Smallest signed distance from p to the edges of a convex polygon; positive inside"""
    orientation = 1.0 if polygon_area(poly) >= 0.0 else -1.0
    margin = math.inf
    for i, a in enumerate(poly):
        b = poly[(i + 1) % len(poly)]
        edge = b - a
        length = edge.norm()
        if length == 0.0:
            continue
        margin = min(margin, orientation * edge.cross(p - a) / length)
    return margin


def point_in_polygon(p: Point2, poly: Sequence[Point2]) -> bool:
    """Even-odd rule; the boundary itself counts as outside"""
    inside = False
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if (a.y > p.y) != (b.y > p.y):
            x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if x > p.x:
                inside = not inside
    return inside


def polygon_boundary_distance(p: Point2, poly: Sequence[Point2]) -> float:
    n = len(poly)
    best = math.inf
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if a.distance(b) <= EPS_SEGMENT:
            best = min(best, a.distance(p))
        else:
            best = min(best, Segment2(a, b).distance(p))
    return best


def polygon_excess(p: Point2, poly: Sequence[Point2]) -> float:
    """Distance from p to the polygon, 0 strictly inside"""
    return 0.0 if point_in_polygon(p, poly) else polygon_boundary_distance(p, poly)


# Normalizing similarity

@dataclass(frozen=True, slots=True)
class Similarity:
    """Proper similarity x -> scale * R(rotation) * x + shift"""

    scale: float
    cos: float
    sin: float
    shift: Point2

    @classmethod
    def normalizing(cls, a1: Point2, a2: Point2) -> "Similarity":
        """Map taking a1 to (-1, 0) and a2 to (1, 0)"""
        d = a2 - a1
        length = d.norm()
        if length <= EPS_SEGMENT:
            raise DomainError("A1 and A2 coincide")
        scale = 2.0 / length
        c, s = d.x / length, -d.y / length
        mid = (a1 + a2) * 0.5
        rx = c * mid.x - s * mid.y
        ry = s * mid.x + c * mid.y
        return cls(scale, c, s, Point2(-scale * rx, -scale * ry))

    @property
    def rotation(self) -> float:
        return math.atan2(self.sin, self.cos)

    def apply(self, p: Point2) -> Point2:
        return Point2(
            self.scale * (self.cos * p.x - self.sin * p.y) + self.shift.x,
            self.scale * (self.sin * p.x + self.cos * p.y) + self.shift.y,
        )

    def invert(self, p: Point2) -> Point2:
        x = (p.x - self.shift.x) / self.scale
        y = (p.y - self.shift.y) / self.scale
        return Point2(self.cos * x + self.sin * y, -self.sin * x + self.cos * y)

    def apply_dir(self, d: Dir2) -> Dir2:
        return Dir2.of(Point2(self.cos * d.x - self.sin * d.y, self.sin * d.x + self.cos * d.y))

    def invert_dir(self, d: Dir2) -> Dir2:
        return Dir2.of(Point2(self.cos * d.x + self.sin * d.y, -self.sin * d.x + self.cos * d.y))
