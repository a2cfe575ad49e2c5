import json

import pytest

from fairfeedback import io
from fairfeedback.verify import arrovian_scenario, prop2_scenario
from fairfeedback.model import Uniform

SHIPPED = ["arrovian.json", "compas-style.json", "prop2-ternary.json", "appendixE-1.json", "appendixE-2.json",
           "symmetric.json", "separable-uniform.json", "impossibility-template.json", "equal-base-rate-template.json"]


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_scenarios_load(name):
    sc = io.load(io.shipped_scenario_path(name))
    assert io.loads(io.dumps(sc)) == sc


@pytest.mark.parametrize("sc", [arrovian_scenario(0.8, Uniform(-1, 1), Uniform(0, 2)), prop2_scenario(3, 0.6)])
def test_round_trip(sc):
    assert io.loads(io.dumps(sc)) == sc


def test_unknown_field_rejected():
    doc = json.loads(io.shipped_scenario_path("symmetric.json").read_text())
    doc["surprise"] = 1
    with pytest.raises(io.ScenarioFormatError) as err:
        io.scenario_from_dict(doc)
    assert any("surprise" in e for e in err.value.errors)


def test_domain_violation_rejected():
    doc = json.loads(io.shipped_scenario_path("symmetric.json").read_text())
    doc["groups"][0]["signal"]["phi"] = 0.3
    with pytest.raises(io.ScenarioFormatError):
        io.scenario_from_dict(doc)


def test_invalid_json_rejected():
    with pytest.raises(io.ScenarioFormatError):
        io.loads("{not json")


def test_content_hash_covers_every_byte():
    data = io.shipped_scenario_path("symmetric.json").read_bytes()
    assert io.content_hash(data) != io.content_hash(data + b" ")
    assert len(io.content_hash(data)) == 64
