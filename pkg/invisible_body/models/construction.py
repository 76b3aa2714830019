import enum
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ..core.conics import ConicArc, ConicKind
from ..core.const import DEFAULT_DEPTH
from ..core.geometry import Point2, Segment2, Similarity


class Source(str, enum.Enum):
    A1 = "A1"
    A2 = "A2"


class Vertex(str, enum.Enum):
    L = "L"
    C1 = "C1"
    C2 = "C2"
    K = "K"


class RailMode(str, enum.Enum):
    ELLIPSE_RAIL = "ellipse-rail"
    HYPERBOLA_RAIL = "hyperbola-rail"


class PieceKind(str, enum.Enum):
    ARC = "arc"
    SEGMENT = "segment"


@dataclass(frozen=True)
class ConstructionParams:
    A1: Point2
    A2: Point2
    L: Point2
    K: Point2
    O: Point2
    H1: Optional[Point2] = None
    # Asymmetric overrides, all three or none
    H2: Optional[Point2] = None
    M: Optional[Point2] = None
    N: Optional[Point2] = None
    depth: int = DEFAULT_DEPTH

    @property
    def asymmetric(self) -> bool:
        return self.H2 is not None

    def mapped(self, frame: Similarity) -> "ConstructionParams":
        """Same parameters with every point sent through a similarity"""
        def move(p: Optional[Point2]) -> Optional[Point2]:
            return None if p is None else frame.apply(p)

        return ConstructionParams(
            A1=move(self.A1), A2=move(self.A2), L=move(self.L), K=move(self.K), O=move(self.O),
            H1=move(self.H1), H2=move(self.H2), M=move(self.M), N=move(self.N),
            depth=self.depth,
        )


@dataclass(frozen=True)
class DerivedPoints:
    C1: Point2
    C2: Point2
    D1: Point2
    D2: Point2
    B1: Point2
    B2: Point2
    N: Point2
    M: Point2
    H1: Point2
    H2: Point2

    def as_dict(self) -> Dict[str, Point2]:
        return {
            "C1": self.C1, "C2": self.C2, "D1": self.D1, "D2": self.D2, "B1": self.B1,
            "B2": self.B2, "N": self.N, "M": self.M, "H1": self.H1, "H2": self.H2,
        }


@dataclass(frozen=True)
class SequenceSpec:
    """Descriptor of one of the eight arc sequences"""

    name: str
    source: Source
    vertex: Vertex
    kind: ConicKind
    rail_focus: str
    corner: str

    @property
    def mode(self) -> RailMode:
        if self.kind is ConicKind.ELLIPSE:
            return RailMode.ELLIPSE_RAIL
        return RailMode.HYPERBOLA_RAIL


@dataclass(frozen=True)
class Rails:
    """Both rails start at the rail focus"""

    vertex_rail: Segment2
    clip_rail: Segment2


@dataclass(frozen=True)
class ArcSequence:
    spec: SequenceSpec
    source: Point2
    rail_focus: Point2
    arcs: Tuple[ConicArc, ...]
    # lambda_i / sigma_i; starts[0] is the vertex
    starts: Tuple[Point2, ...]
    # nu_i / chi_i; ends[0] is the clip point of the base arc
    ends: Tuple[Point2, ...]
    rails: Rails

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def depth(self) -> int:
        return len(self.arcs) - 1


@dataclass(frozen=True)
class Quadrangle:
    vertex: Vertex
    corner: Point2
    arcs: Tuple[ConicArc, ConicArc]
    segments: Tuple[Segment2, Segment2]
    outline: Tuple[Point2, ...]


@dataclass(frozen=True)
class Piece:
    """One reflecting boundary element"""

    index: int
    kind: PieceKind
    label: str
    center: Point2
    radius: float
    arc: Optional[ConicArc] = None
    segment: Optional[Segment2] = None
    sequence: Optional[str] = None
    level: Optional[int] = None
    quad: Optional[Vertex] = None

    @property
    def endpoints(self) -> Tuple[Point2, Point2]:
        if self.arc is not None:
            return self.arc.start, self.arc.end
        return self.segment.a, self.segment.b


@dataclass(frozen=True)
class Body2D:
    """Normalized-frame body; `frame` maps caller coordinates into it"""

    params: ConstructionParams
    points: DerivedPoints
    frame: Similarity
    sequences: Tuple[ArcSequence, ...]
    quads: Tuple[Quadrangle, ...]
    pieces: Tuple[Piece, ...]

    def sequence(self, name: str) -> ArcSequence:
        for seq in self.sequences:
            if seq.name == name:
                return seq
        raise KeyError(name)

    def quad(self, vertex: Vertex) -> Quadrangle:
        for quad in self.quads:
            if quad.vertex is vertex:
                return quad
        raise KeyError(vertex)

    def source_point(self, source: Source) -> Point2:
        return self.params.A1 if source is Source.A1 else self.params.A2

    @property
    def depth(self) -> int:
        return self.params.depth
