from pathlib import Path
from typing import Optional, Tuple

from pydantic import BaseModel, Field, FiniteFloat, StrictInt, ValidationError, field_validator, model_validator

from ..core.const import DEFAULT_DEPTH, TAU
from ..core.errors import ConfigIOError, InvalidConfigFile
from ..core.geometry import Point2
from ..models.construction import ConstructionParams

PointField = Tuple[FiniteFloat, FiniteFloat]

SEQUENCE_NAMES = ("A2/L", "A2/C1", "A2/C2", "A2/K", "A1/L", "A1/C2", "A1/C1", "A1/K")


class PerturbationSpec(BaseModel):
    sequence: str
    arc: StrictInt = Field(0, ge=0)
    factor: FiniteFloat = Field(..., gt=0)

    class Config:
        extra = "forbid"

    @field_validator("sequence")
    @classmethod
    def known_sequence(cls, v: str) -> str:
        if v not in SEQUENCE_NAMES:
            raise ValueError(f"unknown sequence {v!r}, expected one of {', '.join(SEQUENCE_NAMES)}")
        return v


class ConfigFile(BaseModel):
    A1: PointField
    A2: PointField
    L: PointField
    K: PointField
    O: PointField
    H1: Optional[PointField] = None
    H2: Optional[PointField] = None
    M: Optional[PointField] = None
    N: Optional[PointField] = None
    depth: StrictInt = Field(DEFAULT_DEPTH, ge=0)
    seed: StrictInt = 42
    n_rays: StrictInt = Field(10000, ge=1)
    angular_range: Optional[Tuple[FiniteFloat, FiniteFloat]] = None
    perturbation: Optional[PerturbationSpec] = None

    class Config:
        extra = "forbid"

    @model_validator(mode="after")
    def check_overrides(self) -> "ConfigFile":
        given = [name for name in ("H2", "M", "N") if getattr(self, name) is not None]
        if given and len(given) != 3:
            raise ValueError("H2, M and N must be given together")
        if given and self.H1 is None:
            raise ValueError("asymmetric overrides require H1")
        if self.angular_range is not None:
            lo, hi = self.angular_range
            if not (0.0 <= lo < hi <= TAU + 1e-12):
                raise ValueError("angular_range must satisfy 0 <= theta0 < theta1 <= 2*pi")
        return self

    def to_params(self) -> ConstructionParams:
        def point(v: Optional[PointField]) -> Optional[Point2]:
            return None if v is None else Point2(float(v[0]), float(v[1]))

        return ConstructionParams(
            A1=point(self.A1), A2=point(self.A2), L=point(self.L), K=point(self.K), O=point(self.O),
            H1=point(self.H1), H2=point(self.H2), M=point(self.M), N=point(self.N),
            depth=self.depth,
        )

    @property
    def revolved_range(self) -> Tuple[float, float]:
        return self.angular_range if self.angular_range is not None else (0.0, TAU)


def parse_config(text: str) -> ConfigFile:
    try:
        return ConfigFile.model_validate_json(text)
    except ValidationError as exc:
        problems = [
            {"loc": ".".join(str(part) for part in err["loc"]), "msg": err["msg"]}
            for err in exc.errors()
        ]
        raise InvalidConfigFile("config file does not match the schema", problems=problems) from exc


def load_config(path) -> ConfigFile:
    """Read and validate a JSON run config"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigIOError(f"cannot read config {path}: {exc.strerror}", path=str(path)) from exc
    return parse_config(text)

