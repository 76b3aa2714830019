from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel

from .report import ValidationReport


class PointPair(BaseModel):
    normalized: Tuple[float, float]
    caller: Tuple[float, float]


class FrameDocument(BaseModel):
    scale: float
    rotation: float
    shift: Tuple[float, float]


class SequenceDocument(BaseModel):
    name: str
    source: str
    vertex: str
    kind: str
    rail_focus: str
    corner: str
    focal_constants: List[float]
    starts: List[Tuple[float, float]]
    ends: List[Tuple[float, float]]


class PieceDocument(BaseModel):
    index: int
    kind: str
    label: str
    sequence: Optional[str] = None
    level: Optional[int] = None
    quad: Optional[str] = None


class BodyDocument(BaseModel):
    depth: int
    frame: FrameDocument
    points: Dict[str, PointPair]
    validation: ValidationReport
    sequences: List[SequenceDocument]
    arc_pieces: int
    segment_pieces: int
    pieces: List[PieceDocument]
