import json

import pytest
from jsonschema import Draft202012Validator
from pydantic import ValidationError

from invisible_body.config import Settings
from invisible_body.core.const import TAU
from invisible_body.core.errors import ConfigIOError, InvalidConfigFile
from invisible_body.core.geometry import Point2
from invisible_body.schemas.config import SEQUENCE_NAMES, ConfigFile, load_config, parse_config
from invisible_body.services.construction import sequence_specs

from .conftest import CONFIGS

BASE = {"A1": [-1, 0], "A2": [1, 0], "L": [0, 1], "K": [0, 3], "O": [0, 2]}


def problems_of(document) -> list:
    with pytest.raises(InvalidConfigFile) as info:
        parse_config(json.dumps(document))
    return info.value.extra["problems"]


class TestLoading:
    def test_canonical_file(self):
        cfg = load_config(CONFIGS / "canonical.json")
        params = cfg.to_params()
        assert params.L == Point2(0.0, 1.0)
        assert params.depth == 12
        assert cfg.n_rays == 10000
        assert cfg.perturbation is None
        assert cfg.revolved_range == (0.0, TAU)
        assert not params.asymmetric

    def test_defaults(self):
        cfg = parse_config(json.dumps(BASE))
        assert (cfg.depth, cfg.seed, cfg.n_rays) == (12, 42, 10000)

    def test_asymmetric_file(self):
        params = load_config(CONFIGS / "asymmetric.json").to_params()
        assert params.asymmetric
        assert params.H2 == Point2(0.35826693046501989, 1.5334586390699598)
        assert params.M.x != 0.0

    def test_perturbed_file(self):
        cfg = load_config(CONFIGS / "perturbed.json")
        assert cfg.perturbation.sequence == "A2/L"
        assert cfg.perturbation.arc == 0
        assert cfg.perturbation.factor == pytest.approx(1.01)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigIOError) as info:
            load_config(tmp_path / "absent.json")
        assert info.value.exit_code == 3
        assert info.value.to_dict()["error"] == "io_error"


class TestRejection:
    def test_unknown_key(self):
        problems = problems_of({**BASE, "colour": "red"})
        assert [p["loc"] for p in problems] == ["colour"]

    def test_missing_point(self):
        document = dict(BASE)
        del document["K"]
        assert [p["loc"] for p in problems_of(document)] == ["K"]

    def test_negative_depth(self):
        assert [p["loc"] for p in problems_of({**BASE, "depth": -1})] == ["depth"]

    def test_point_needs_two_coordinates(self):
        assert problems_of({**BASE, "O": [0, 2, 1]})

    def test_partial_asymmetric_overrides(self):
        problems_of({**BASE, "H1": [-0.36, 1.53], "H2": [0.35, 1.52]})

    def test_overrides_need_h1(self):
        problems_of({**BASE, "H2": [0.35, 1.52], "M": [0, 2.36], "N": [0, 1.13]})

    def test_bad_angular_range(self):
        problems_of({**BASE, "angular_range": [2.0, 1.0]})

    def test_unknown_perturbed_sequence(self):
        problems = problems_of({**BASE, "perturbation": {"sequence": "A3/L", "factor": 1.01}})
        assert problems[0]["loc"] == "perturbation.sequence"

    def test_invalid_file_exit_code(self):
        with pytest.raises(InvalidConfigFile) as info:
            parse_config("{not json")
        assert info.value.exit_code == 2


class TestSchemaFile:
    @pytest.fixture(scope="class")
    def schema(self):
        return json.loads((CONFIGS / "config.schema.json").read_text())

    def test_properties_match_the_model(self, schema):
        assert set(schema["properties"]) == set(ConfigFile.model_fields)
        required = {name for name, field in ConfigFile.model_fields.items() if field.is_required()}
        assert set(schema["required"]) == required

    def test_perturbation_block(self, schema):
        block = schema["properties"]["perturbation"]
        assert block["properties"]["sequence"]["enum"] == list(SEQUENCE_NAMES)
        assert set(block["required"]) == {"sequence", "factor"}

    def test_sequence_names_match_the_construction(self):
        assert [spec.name for spec in sequence_specs()] == list(SEQUENCE_NAMES)

    def test_schema_is_well_formed(self, schema):
        Draft202012Validator.check_schema(schema)

    @pytest.mark.parametrize("name", ["canonical.json", "asymmetric.json", "perturbed.json"])
    def test_shipped_configs_conform(self, schema, name):
        document = json.loads((CONFIGS / name).read_text())
        Draft202012Validator(schema).validate(document)
        parse_config(json.dumps(document))

    @pytest.mark.parametrize("document", [
        {**BASE, "H2": [0.35, 1.52]},
        {**BASE, "L": [0, 1, 2]},
        {**BASE, "colour": "red"},
        {**BASE, "depth": -1},
        {**BASE, "perturbation": {"sequence": "A3/L", "factor": 1.01}},
    ])
    def test_schema_and_model_reject_alike(self, schema, document):
        assert not Draft202012Validator(schema).is_valid(document)
        problems_of(document)

    def test_defaults_match_the_model(self, schema):
        for name in ("depth", "seed", "n_rays"):
            assert schema["properties"][name]["default"] == ConfigFile.model_fields[name].default


class TestSettings:
    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("INVIS_WORKERS", "3")
        monkeypatch.setenv("INVIS_LOG_LEVEL", "DEBUG")
        fresh = Settings()
        assert fresh.WORKERS == 3
        assert fresh.LOG_LEVEL == "DEBUG"

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("INVIS_WORKERS", raising=False)
        assert Settings(_env_file=None).WORKERS == 1

    def test_workers_must_be_positive(self, monkeypatch):
        monkeypatch.setenv("INVIS_WORKERS", "0")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)
