"""Scenario documents: JSON parsing, schema validation and serialization."""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .model import (
    AffineTable,
    AsymmetricBinary,
    Endogenous,
    Exogenous,
    General,
    Group,
    Logistic,
    Normal,
    NormalizedError,
    ReviewerPreferences,
    Scenario,
    Separable,
    StochasticAlgorithm,
    SymmetricBinary,
    Uniform,
    validate,
)

SCHEMA_VERSION = 1


class ScenarioFormatError(ValueError):
    """Document failed schema checks or domain validation."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@lru_cache(maxsize=1)
def scenario_schema() -> dict:
    text = resources.files("fairfeedback").joinpath("schema/scenario.v1.schema.json").read_text()
    return json.loads(text)


def _distribution(d: dict):
    kind = d["kind"]
    if kind == "uniform":
        return Uniform(float(d["a"]), float(d["b"]))
    if kind == "logistic":
        return Logistic(float(d["mu"]), float(d["scale"]))
    return Normal(float(d["mu"]), float(d["sigma"]))


def _signal(d: dict):
    kind = d["kind"]
    if kind == "symmetric_binary":
        return SymmetricBinary(float(d["phi"]))
    if kind == "asymmetric_binary":
        return AsymmetricBinary(float(d["phi0"]), float(d["phi1"]))
    return General(d["matrix"])


def _prevalence(d: dict):
    if d["mode"] == "endogenous":
        return Endogenous()
    pi = d["pi"]
    return Exogenous(tuple(float(x) for x in pi) if isinstance(pi, list) else float(pi))


def _preferences(d: dict):
    kind = d["kind"]
    if kind == "separable":
        return Separable(float(d["r"]))
    if kind == "normalized_error":
        return NormalizedError(
            {g: float(x) for g, x in d["lambda"].items()},
            {g: float(x) for g, x in d["gamma"].items()},
        )
    entries = {}
    for e in d["entries"]:
        key = (int(e["behavior"]), int(e["decision"]), e["group"])
        if key in entries:
            raise ScenarioFormatError([f"preferences.entries: duplicate cell {key}"])
        entries[key] = (float(e["c"]), float(e["m"]))
    return AffineTable(entries)


def scenario_from_dict(doc: dict, *, check: bool = True) -> Scenario:
    """Parse a document; raises ScenarioFormatError on schema or domain violations."""
    validator = jsonschema.Draft202012Validator(scenario_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise ScenarioFormatError(
            [f"{'/'.join(str(p) for p in e.absolute_path) or '<root>'}: {e.message}" for e in errors]
        )
    weights = {
        g: (float(w) if isinstance(w, (int, float)) else tuple(tuple(float(x) for x in r) for r in w))
        for g, w in doc.get("ex_post_weights", {}).items()
    }
    scenario = Scenario(
        k=int(doc["k"]),
        groups=tuple(
            Group(
                g["id"],
                _distribution(g["distribution"]),
                _signal(g["signal"]),
                _prevalence(g["prevalence"]),
            )
            for g in doc["groups"]
        ),
        preferences=_preferences(doc["preferences"]),
        algorithm=StochasticAlgorithm(doc["algorithm"]),
        ex_post_weights=weights,
        reviewer=ReviewerPreferences(doc["reviewer"]) if "reviewer" in doc else None,
        tie_tolerance=float(doc.get("tie_tolerance", 1e-9)),
    )
    if check:
        result = validate(scenario)
        if not result.ok:
            raise ScenarioFormatError(result.messages())
    return scenario


def scenario_to_dict(scenario: Scenario) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "k": scenario.k,
        "tie_tolerance": scenario.tie_tolerance,
        "groups": [
            {
                "id": g.id,
                "distribution": g.distribution.to_dict(),
                "signal": g.signal.to_dict(),
                "prevalence": g.prevalence.to_dict(),
            }
            for g in scenario.groups
        ],
        "preferences": scenario.preferences.to_dict(),
        "algorithm": scenario.algorithm.to_dict(),
    }
    if scenario.ex_post_weights:
        doc["ex_post_weights"] = {
            g: (w if isinstance(w, float) else [list(r) for r in w])
            for g, w in scenario.ex_post_weights.items()
        }
    if scenario.reviewer is not None:
        doc["reviewer"] = scenario.reviewer.to_dict()
    return doc


def dumps(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2)


def loads(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError([f"<root>: invalid JSON ({exc})"]) from exc
    if not isinstance(doc, dict):
        raise ScenarioFormatError(["<root>: scenario document must be an object"])
    return scenario_from_dict(doc)


def load(path: str | Path) -> Scenario:
    return loads(Path(path).read_text())


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def shipped_scenario_path(name: str) -> Path:
    """Path of one of the bundled example scenarios, e.g. ``arrovian.json``."""
    return Path(str(resources.files("fairfeedback").joinpath(f"scenarios/{name}")))
