from typing import Dict

from pydantic import BaseModel, Field


DEFAULT_COLORS = {
    "ellipse": "#1f4e9c",
    "hyperbola": "#b3261e",
    "segment": "#333333",
    "quad": "#e8e8e8",
    "rail": "#9a9a9a",
    "ray": "#2e7d32",
    "point": "#000000",
}


class SceneStyle(BaseModel):
    width_px: int = Field(default=900, ge=64)
    # fraction of the drawing extent added on every side
    padding: float = Field(default=0.08, ge=0.0)
    arc_width: float = Field(default=0.006, gt=0.0)
    segment_width: float = Field(default=0.004, gt=0.0)
    rail_width: float = Field(default=0.002, gt=0.0)
    ray_width: float = Field(default=0.003, gt=0.0)
    point_radius: float = Field(default=0.012, gt=0.0)
    font_size: float = Field(default=0.06, gt=0.0)
    colors: Dict[str, str] = Field(default_factory=lambda: dict(DEFAULT_COLORS))
    # minimum points per arc; refined until the sagitta is below sagitta * extent
    arc_samples: int = Field(default=32, ge=16)
    sagitta: float = Field(default=1e-3, gt=0.0)
    labels: bool = True
    rails: bool = True

    def color(self, key: str) -> str:
        return self.colors.get(key, DEFAULT_COLORS[key])

    class Config:
        extra = "forbid"
        frozen = True
