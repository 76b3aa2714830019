import enum
from dataclasses import dataclass
from typing import Optional, Tuple

from ..core.geometry import Dir2, Point2, Ray2
from .construction import Piece, PieceKind


class TraceStatus(str, enum.Enum):
    EXITED = "exited"
    MAX_BOUNCES = "max_bounces"
    DEGENERATE_HIT = "degenerate_hit"


@dataclass(frozen=True)
class Hit:
    t: float
    point: Point2
    piece: Piece
    normal: Dir2
    degenerate: bool = False


@dataclass(frozen=True)
class TraceResult:
    initial: Ray2
    bounces: Tuple[Hit, ...]
    exit: Optional[Ray2]
    status: TraceStatus

    @property
    def bounce_points(self) -> Tuple[Point2, ...]:
        return tuple(hit.point for hit in self.bounces)

    @property
    def segment_hits(self) -> int:
        return sum(1 for hit in self.bounces if hit.piece.kind is PieceKind.SEGMENT)


@dataclass(frozen=True)
class DeviationMetrics:
    # angle between initial and exit directions
    angle: float
    # distance from the source to the exit line
    source_distance: float
    # distance from the exit origin to the initial line
    line_offset: float

    @property
    def max(self) -> float:
        return max(self.angle, self.source_distance, self.line_offset)
