"""Error rate balance, accuracy balance and predictive parity."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .equilibrium import equilibrium_prevalence
from .model import ANALYTIC_TOL, Endogenous, Exogenous, Scenario
from .statistics import REACHABILITY_TOL, posterior

SATISFIED = "satisfied"
VIOLATED = "violated"
VACUOUS = "vacuous"


@dataclass(frozen=True)
class PredicateReport:
    name: str
    verdict: str
    residual: float
    tolerance: float
    witness: dict | None = None
    skipped: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """Satisfied or vacuous."""
        return self.verdict != VIOLATED

    def to_dict(self) -> dict:
        return {
            "predicate": self.name,
            "verdict": self.verdict,
            "residual": _json_num(self.residual),
            "tolerance": self.tolerance,
            "witness": _jsonable(self.witness),
            "skipped": list(self.skipped),
            "details": _jsonable(self.details),
        }


def _json_num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, float) and math.isnan(x):
        return None
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_num(obj.item())
    if isinstance(obj, float):
        return _json_num(obj)
    return obj


def make_report(name, compared: int, residual: float, tolerance: float, witness=None, skipped=(), details=None):
    """Build a report; ``compared`` counts comparisons that were not skipped."""
    if compared == 0:
        verdict, residual = VACUOUS, 0.0
    else:
        verdict = SATISFIED if residual <= tolerance else VIOLATED
    return PredicateReport(name, verdict, float(residual), tolerance, witness, tuple(skipped), details or {})


def group_pairs(scenario: Scenario):
    return list(itertools.combinations(scenario.labels, 2))


# ---------------------------------------------------------------------------
# Prevalence resolution
# ---------------------------------------------------------------------------


def resolve_prevalences(scenario: Scenario, mode: str = "exogenous") -> dict[str, np.ndarray]:
    """Per-group behavior distributions.

    ``exogenous`` uses the stated prevalence and falls back to the equilibrium
    for endogenous groups; ``equilibrium`` always uses best-response masses.
    """
    if mode not in ("exogenous", "equilibrium"):
        raise ValueError(f"unknown prevalence mode {mode!r}")
    out = {}
    for g in scenario.groups:
        if mode == "exogenous" and isinstance(g.prevalence, Exogenous):
            out[g.id] = g.prevalence.distribution(scenario.k)
        else:
            out[g.id] = equilibrium_prevalence(scenario.with_prevalences({g.id: Endogenous()}), g.id)
    return out


def _prev(prevalences: Mapping[str, np.ndarray], g: str) -> np.ndarray:
    return np.asarray(prevalences[g], dtype=float)


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------


def _conditional_comparison(name, scenario, prevalences, tolerance, diagonal_only):
    residual, witness, skipped, compared = 0.0, None, [], 0
    for g, h in group_pairs(scenario):
        cg, ch = scenario.conditional(g), scenario.conditional(h)
        pg, ph = _prev(prevalences, g), _prev(prevalences, h)
        for beta in range(scenario.k):
            if pg[beta] <= 0.0 or ph[beta] <= 0.0:
                skipped.append(f"{g}/{h} behavior {beta}: zero prevalence")
                continue
            decisions = [beta] if diagonal_only else range(scenario.k)
            for d in decisions:
                compared += 1
                gap = abs(cg[beta, d] - ch[beta, d])
                if witness is None or gap > residual:
                    residual = gap
                    witness = {
                        "groups": [g, h],
                        "behavior": beta,
                        "decision": d,
                        "values": [float(cg[beta, d]), float(ch[beta, d])],
                    }
    return make_report(name, compared, residual, tolerance, witness, skipped)


def check_erb(scenario: Scenario, prevalences, tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    """Max gap in ``Pr[d | beta, g]`` across group pairs."""
    return _conditional_comparison("ERB", scenario, prevalences, tolerance, diagonal_only=False)


def check_ab(scenario: Scenario, prevalences, tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    """Max gap in ``Pr[d = beta | beta, g]`` across group pairs."""
    return _conditional_comparison("AB", scenario, prevalences, tolerance, diagonal_only=True)


def check_pp(scenario: Scenario, prevalences, tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    """Max gap in posterior behavior distributions at decisions reachable in both groups."""
    residual, witness, skipped, compared = 0.0, None, [], 0
    posts = {g: posterior(scenario, g, _prev(prevalences, g)) for g in scenario.labels}
    for g, h in group_pairs(scenario):
        for d in range(scenario.k):
            if not (posts[g].reachable(d) and posts[h].reachable(d)):
                skipped.append(f"{g}/{h} decision {d}: unreachable")
                continue
            for beta in range(scenario.k):
                compared += 1
                a, b = posts[g].h(d, beta), posts[h].h(d, beta)
                gap = abs(a - b)
                if witness is None or gap > residual:
                    residual = gap
                    witness = {"groups": [g, h], "decision": d, "behavior": beta, "values": [a, b]}
    details = {"reachability_threshold": REACHABILITY_TOL}
    return make_report("PP", compared, residual, tolerance, witness, skipped, details)
