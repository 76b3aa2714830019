from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel

from .config import PerturbationSpec


# Configuration validation

class ValidationItem(BaseModel):
    name: str
    passed: bool
    margin: float
    required: bool = True
    detail: Optional[str] = None


class ValidationReport(BaseModel):
    items: List[ValidationItem]
    passed: bool

    @property
    def failures(self) -> List[str]:
        return [item.name for item in self.items if item.required and not item.passed]


# Invisibility sweeps

class SweepReport(BaseModel):
    source: str
    source_point: Tuple[float, float]
    n_rays: int
    seed: int
    rng: str
    depth: int
    # caller-frame direction angles, radians
    handled_cone: List[Tuple[float, float]]
    coverage: float
    status_counts: Dict[str, int]
    bounce_histogram: Dict[str, int]
    degenerate_count: int
    segment_hits: int
    unhandled_count: int = 0
    max_deviation: float
    mean_deviation: float
    max_angle: float
    max_source_distance: float
    max_line_offset: float
    max_focal_line_residual: float
    wall_time: Optional[float] = None
    passed: bool


class VerifyReport(BaseModel):
    sweeps: List[SweepReport]
    perturbation: Optional[PerturbationSpec] = None
    passed: bool


class RayRecord(BaseModel):
    """One traced ray, written as a JSONL line"""

    source: str
    angle: float
    origin: Tuple[float, float]
    direction: Tuple[float, float]
    status: str
    bounces: List[Tuple[float, float]]
    pieces: List[str]
    exit_origin: Optional[Tuple[float, float]] = None
    exit_direction: Optional[Tuple[float, float]] = None
    angle_deviation: Optional[float] = None
    source_distance: Optional[float] = None
    line_offset: Optional[float] = None


# Audits

class AuditCheck(BaseModel):
    name: str
    worst_residual: float
    threshold: float
    samples: int
    passed: bool
    detail: Optional[str] = None


class AuditReport(BaseModel):
    depth: int
    checks: List[AuditCheck]
    passed: bool


# Lemma and appendix

class AppendixCheck(BaseModel):
    sine_law: float
    c_formula: float
    cosine_law: float

    @property
    def worst(self) -> float:
        return max(self.sine_law, self.c_formula, self.cosine_law)


class LemmaReport(BaseModel):
    samples: int
    seed: int
    rng: str
    gamma_values: int
    phi_max_error: float
    phi_max_gamma_stdev: float
    lemma_a_max_residual: float
    lemma_b_max_residual: float
    appendix_max_residual: float
    rejected: Dict[str, int]
    threshold: float
    passed: bool
