from .construction import (
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
from .lemma import LemmaConfig
from .revolve import Body3D, Point3, Ray3, TraceResult3, TriangleMesh
from .trace import DeviationMetrics, Hit, TraceResult, TraceStatus

__all__ = [
    "ArcSequence",
    "Body2D",
    "ConstructionParams",
    "DerivedPoints",
    "Piece",
    "PieceKind",
    "Quadrangle",
    "RailMode",
    "Rails",
    "SequenceSpec",
    "Source",
    "Vertex",
    "LemmaConfig",
    "Body3D",
    "Point3",
    "Ray3",
    "TraceResult3",
    "TriangleMesh",
    "DeviationMetrics",
    "Hit",
    "TraceResult",
    "TraceStatus",
]
