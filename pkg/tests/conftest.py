import json
from pathlib import Path

import pytest

from invisible_body.core.geometry import Point2
from invisible_body.models.construction import ConstructionParams
from invisible_body.services.construction import build_body

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def canonical(depth: int = 12, **overrides) -> ConstructionParams:
    values = dict(
        A1=Point2(-1.0, 0.0),
        A2=Point2(1.0, 0.0),
        L=Point2(0.0, 1.0),
        K=Point2(0.0, 3.0),
        O=Point2(0.0, 2.0),
        depth=depth,
    )
    values.update(overrides)
    return ConstructionParams(**values)


@pytest.fixture(scope="session")
def params():
    return canonical()


@pytest.fixture(scope="session")
def body(params):
    return build_body(params)


@pytest.fixture(scope="session")
def small_body():
    return build_body(canonical(depth=3))


@pytest.fixture
def config_path(tmp_path):
    """Writes a canonical config with the given overrides and returns its path"""
    def make(**overrides) -> Path:
        document = json.loads((CONFIGS / "canonical.json").read_text())
        document.update(overrides)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(document))
        return path

    return make
