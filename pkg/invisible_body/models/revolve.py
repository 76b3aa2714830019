import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..core.const import EPS_UNIT, TAU
from ..core.errors import DomainError
from .construction import Body2D
from .trace import TraceResult, TraceStatus


@dataclass(frozen=True, slots=True)
class Point3:
    x: float
    y: float
    z: float

    def __add__(self, other: "Point3") -> "Point3":
        return Point3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Point3") -> "Point3":
        return Point3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> "Point3":
        return Point3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def dot(self, other: "Point3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Point3") -> "Point3":
        return Point3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def distance(self, other: "Point3") -> float:
        return (self - other).norm()

    def unit(self) -> "Point3":
        n = self.norm()
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return Point3(self.x / n, self.y / n, self.z / n)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class Ray3:
    origin: Point3
    dir: Point3

    def __post_init__(self):
        if abs(self.dir.norm() - 1.0) > EPS_UNIT:
            raise DomainError("ray direction is not unit-norm")

    def at(self, t: float) -> Point3:
        return self.origin + self.dir * t


@dataclass(frozen=True)
class Body3D:
    """
    Revolution of a planar body about the line A1A2 (the x axis of its
    normalized frame). Meridian angles are measured from the half-plane
    holding the planar body.
    """

    base: Body2D
    angular_range: Tuple[float, float] = (0.0, TAU)

    def __post_init__(self):
        lo, hi = self.angular_range
        if not (0.0 <= lo < hi <= TAU + 1e-12):
            raise DomainError(f"angular range ({lo}, {hi}) must satisfy 0 <= theta0 < theta1 <= 2*pi")

    @property
    def span(self) -> float:
        return self.angular_range[1] - self.angular_range[0]

    @property
    def full_turn(self) -> bool:
        return self.span >= TAU - 1e-12

    @property
    def side(self) -> float:
        """+1 when the planar body sits at y > 0 in the normalized frame"""
        return 1.0 if self.base.params.L.y > 0.0 else -1.0


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    # (V, 3) float positions, (F, 3) int vertex indices
    vertices: np.ndarray
    faces: np.ndarray
    # (piece index, first vertex, end vertex, first face, end face)
    groups: Tuple[Tuple[int, int, int, int, int], ...]

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def face_count(self) -> int:
        return int(self.faces.shape[0])


@dataclass(frozen=True)
class TraceResult3:
    initial: Ray3
    bounces: Tuple[Point3, ...]
    exit: Optional[Ray3]
    status: TraceStatus
    # rotation about the axis taking the base half-plane to the ray's meridian
    meridian: float
    planar: TraceResult
