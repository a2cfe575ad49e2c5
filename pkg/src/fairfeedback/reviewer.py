"""A downstream reviewer who turns decisions into consequences.

The reviewer sees the decision and the group, forms the posterior over
behaviors, and picks the consequence maximizing expected payoff.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .fairness_statistical import PredicateReport, check_pp, group_pairs, make_report
from .model import ANALYTIC_TOL, ReviewerPreferences, Scenario
from .statistics import posterior


@dataclass(frozen=True)
class ReviewerChoice:
    expected: tuple[float, ...]  # expected payoff of each consequence
    optimal: frozenset[int]
    selected: int
    value: float


@dataclass(frozen=True)
class ReviewerPolicy:
    choices: dict  # (d, g) -> ReviewerChoice, reachable pairs only
    decision_probs: dict  # g -> tuple Pr[d | g]

    def get(self, d: int, g: str) -> ReviewerChoice | None:
        return self.choices.get((d, g))

    def to_dict(self) -> dict:
        return {
            f"{g}:{d}": {"optimal": sorted(c.optimal), "selected": c.selected, "value": c.value}
            for (d, g), c in sorted(self.choices.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        }


def reviewer_policy(scenario: Scenario, reviewer: ReviewerPreferences, prevalences,
                    tie: float | None = None) -> ReviewerPolicy:
    tie = scenario.tie_tolerance if tie is None else tie
    choices, probs = {}, {}
    for g in scenario.labels:
        post = posterior(scenario, g, prevalences[g])
        probs[g] = post.decision_probs
        table = reviewer.table(g)  # [x][beta][d]
        for d in range(scenario.k):
            if not post.reachable(d):
                continue
            expected = table[:, :, d] @ np.array(post.rows[d])
            top = expected.max()
            optimal = frozenset(int(x) for x in np.flatnonzero(expected >= top - tie))
            choices[(d, g)] = ReviewerChoice(tuple(float(v) for v in expected), optimal, min(optimal), float(top))
    return ReviewerPolicy(choices, probs)


def check_group_blind(reviewer: ReviewerPreferences, tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    residual, witness, compared = 0.0, None, 0
    for g, h in itertools.combinations(sorted(reviewer.payoffs), 2):
        compared += 1
        diff = np.abs(reviewer.table(g) - reviewer.table(h))
        gap = float(diff.max())
        if witness is None or gap > residual:
            x, b, d = np.unravel_index(int(diff.argmax()), diff.shape)
            residual = gap
            witness = {"groups": [g, h], "consequence": int(x), "behavior": int(b), "decision": int(d)}
    return make_report("group-blind", compared, residual, tolerance, witness)


def _expected_value(policy: ReviewerPolicy, value_group: str, weight_group: str, k: int):
    """``sum_d Pr[d | weight_group] * V_R*(d, value_group)``; None if a weighted decision has no value."""
    total = 0.0
    for d in range(k):
        p = policy.decision_probs[weight_group][d]
        choice = policy.get(d, value_group)
        if choice is None:
            if p > 0.0 and policy.get(d, weight_group) is not None:
                return None
            continue
        total += p * choice.value
    return total


def check_prejudice_free_reviewer(scenario: Scenario, reviewer: ReviewerPreferences, prevalences,
                                  tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    """Compare each group's expected reviewer value under its own decision distribution."""
    policy = reviewer_policy(scenario, reviewer, prevalences)
    k = scenario.k
    own = {g: _expected_value(policy, g, g, k) for g in scenario.labels}
    residual, witness, compared = 0.0, None, 0
    common_residual, skipped = 0.0, []
    for g, h in group_pairs(scenario):
        compared += 1
        gap = abs(own[g] - own[h])
        if witness is None or gap > residual:
            residual, witness = gap, {"groups": [g, h], "values": [own[g], own[h]]}
        for evaluator in (g, h):
            other = h if evaluator == g else g
            a = _expected_value(policy, evaluator, evaluator, k)
            b = _expected_value(policy, other, evaluator, k)
            if b is None:
                skipped.append(f"common-distribution {evaluator}->{other}: decision unreachable for {other}")
                continue
            common_residual = max(common_residual, abs(a - b))
    details = {
        "own_distribution_values": own,
        "common_distribution_residual": common_residual,
        "policy": policy.to_dict(),
    }
    return make_report("PF-reviewer", compared, residual, tolerance, witness, skipped, details)


def check_equal_consequences_reviewer(scenario: Scenario, reviewer: ReviewerPreferences, prevalences,
                                      tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    """Some consequence is optimal for every group at each decision reachable in all of them.

    Residual: smallest worst-group regret of a common consequence (zero iff one exists).
    """
    policy = reviewer_policy(scenario, reviewer, prevalences)
    residual, witness, skipped, compared = 0.0, None, [], 0
    labels = scenario.labels
    if len(labels) < 2:
        return make_report("EC-reviewer", 0, 0.0, tolerance)
    for d in range(scenario.k):
        choices = [policy.get(d, g) for g in labels]
        if any(c is None for c in choices):
            skipped.append(f"decision {d}: unreachable in some group")
            continue
        compared += 1
        common = frozenset.intersection(*(c.optimal for c in choices))
        if common:
            continue
        regret = min(
            max(c.value - c.expected[x] for c in choices) for x in range(scenario.k)
        )
        if regret > residual or witness is None:
            residual = max(residual, regret)
            witness = {"decision": d, "optimal_sets": {g: sorted(c.optimal) for g, c in zip(labels, choices)}}
    verdict_report = make_report("EC-reviewer", compared, residual, tolerance, witness, skipped)
    if witness is not None and verdict_report.passed:
        # disjoint optimal sets always violate, however small the regret
        verdict_report = PredicateReport("EC-reviewer", "violated", residual, tolerance, witness, tuple(skipped))
    return verdict_report


@dataclass(frozen=True)
class EquivalenceReport:
    pf: PredicateReport
    ec: PredicateReport
    pp: PredicateReport
    group_blind: bool
    binary: bool
    asserted: tuple[str, ...]
    agreements: dict

    @property
    def consistent(self) -> bool:
        return all(self.agreements[name] for name in self.asserted)

    def to_dict(self) -> dict:
        return {
            "PF-reviewer": self.pf.verdict,
            "EC-reviewer": self.ec.verdict,
            "PP": self.pp.verdict,
            "group_blind": self.group_blind,
            "asserted": list(self.asserted),
            "agreements": self.agreements,
            "hypothesis": "met" if self.group_blind else "hypothesis unmet",
        }


def verify_reviewer_equivalence(scenario: Scenario, reviewer: ReviewerPreferences, prevalences,
                                tolerance: float = ANALYTIC_TOL) -> EquivalenceReport:
    pf = check_prejudice_free_reviewer(scenario, reviewer, prevalences, tolerance)
    ec = check_equal_consequences_reviewer(scenario, reviewer, prevalences, tolerance)
    pp = check_pp(scenario, prevalences, tolerance)
    blind = check_group_blind(reviewer, tolerance).passed
    binary = scenario.k == 2
    agreements = {
        "PF<->EC": pf.passed == ec.passed,
        "PF<->PP": pf.passed == pp.passed,
        "EC<->PP": ec.passed == pp.passed,
    }
    if not blind:
        asserted: tuple[str, ...] = ()
    elif binary:
        asserted = ("PF<->EC", "PF<->PP", "EC<->PP")
    else:
        asserted = ("PF<->EC",)
    return EquivalenceReport(pf, ec, pp, blind, binary, asserted, agreements)
