"""Welfare-based fairness: group independence, equal opportunity, envy freeness,
prejudice freeness and equal consequences.

"For all types" quantifiers are decided exactly: every payoff is affine in the
type, so best-response sets only change at finitely many crossings and value
gaps are piecewise affine between them. A finite probe set is evaluated as well
and reported as a redundancy check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import Envelope, expected_envelope, group_envelope, threshold
from .fairness_statistical import PredicateReport, group_pairs, make_report
from .model import ANALYTIC_TOL, AffineTable, NormalizedError, PreferenceModel, Scenario, Separable
from .statistics import posterior

PROBE_QUANTILES = (0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5,
                   0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99)
PROBE_EPS = 1e-6
_SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class TypeProbe:
    points: tuple[float, ...]

    def __post_init__(self):
        pts: list[float] = []
        for p in sorted(float(x) for x in self.points if math.isfinite(x)):
            if not pts or p - pts[-1] > 1e-12:
                pts.append(p)
        if not pts:
            raise ValueError("type probe must be nonempty")
        object.__setattr__(self, "points", tuple(pts))


def type_probe(scenario: Scenario, eps: float = PROBE_EPS) -> TypeProbe:
    """Quantiles of every group's type distribution plus every crossing point and its neighbours."""
    pts = []
    for g in scenario.groups:
        pts.extend(float(q) for q in np.atleast_1d(g.distribution.quantile(np.array(PROBE_QUANTILES))))
    for g in scenario.labels:
        for h in scenario.labels:
            for t in group_envelope(scenario, g, h).candidates:
                pts.extend((t - eps, t, t + eps))
    return TypeProbe(tuple(pts))


def _regret(env: Envelope, beta: int, t: float) -> float:
    return float(env.values(t)[0] - (env.a[beta] + env.b[beta] * t))


def _optimal(env: Envelope, t: float, tol: float) -> frozenset[int]:
    vals = np.array(env.a) + np.array(env.b) * t
    return frozenset(int(i) for i in np.flatnonzero(vals >= vals.max() - tol))


def _partition(*envs: Envelope) -> list[float]:
    pts = sorted({p for env in envs for p in env.candidates})
    return pts


def _interior(lo: float, hi: float) -> float:
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Group independence
# ---------------------------------------------------------------------------


def check_group_independence(preferences: PreferenceModel, tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    name = "GI"
    if isinstance(preferences, Separable):
        return make_report(name, 1, 0.0, tolerance, details={"structural": True})
    if isinstance(preferences, NormalizedError):
        groups = sorted(preferences.lam)
        residual, witness, compared = 0.0, None, 0
        for g, h in itertools.combinations(groups, 2):
            compared += 1
            gap = abs(preferences.lam[g] - preferences.lam[h]) + abs(preferences.gamma[g] - preferences.gamma[h])
            if witness is None or gap > residual:
                residual, witness = gap, {"groups": [g, h]}
        return make_report(name, compared, residual, tolerance, witness)
    assert isinstance(preferences, AffineTable)
    groups = sorted({g for (_, _, g) in preferences.entries})
    cells = sorted({(b, d) for (b, d, _) in preferences.entries})
    residual, witness, compared = 0.0, None, 0
    for g, h in itertools.combinations(groups, 2):
        for b, d in cells:
            cg, mg = preferences.entries[(b, d, g)]
            ch, mh = preferences.entries[(b, d, h)]
            compared += 1
            gap = abs(cg - ch) + abs(mg - mh)
            if witness is None or gap > residual:
                residual = gap
                witness = {"groups": [g, h], "behavior": b, "decision": d, "values": [[cg, mg], [ch, mh]]}
    return make_report(name, compared, residual, tolerance, witness)


# ---------------------------------------------------------------------------
# Equal opportunity
# ---------------------------------------------------------------------------


def _eo_gaps(eg: Envelope, eh: Envelope, t: float, tol: float) -> tuple[float, float]:
    """(set-equality gap, intersection gap) at type ``t``.

    The equality gap is the largest regret, in the group lacking it, of a
    behavior optimal for only one group. The intersection gap is the smallest
    worst-group regret over behaviors; it is zero iff the optimal sets meet.
    """
    bg, bh = _optimal(eg, t, tol), _optimal(eh, t, tol)
    eq = 0.0
    for beta in bg - bh:
        eq = max(eq, _regret(eh, beta, t))
    for beta in bh - bg:
        eq = max(eq, _regret(eg, beta, t))
    inter = 0.0
    if not bg & bh:
        inter = min(max(_regret(eg, b, t), _regret(eh, b, t)) for b in range(len(eg.a)))
    return eq, inter


def check_equal_opportunity(scenario: Scenario, probe: TypeProbe | None = None,
                            tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    """Both readings: identical optimal sets (verdict) and overlapping optimal sets (details)."""
    probe = type_probe(scenario) if probe is None else probe
    tie = scenario.tie_tolerance
    res_eq = res_int = probe_res = 0.0
    wit_eq = wit_int = None
    compared = 0
    for g, h in group_pairs(scenario):
        eg, eh = group_envelope(scenario, g), group_envelope(scenario, h)
        cuts = _partition(eg, eh)
        edges = [-math.inf, *cuts, math.inf]
        points = list(cuts)
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid = _interior(lo, hi)
            points.append(mid)
            bg, bh = _optimal(eg, mid, tie), _optimal(eh, mid, tie)
            # regret is affine inside the cell, so its supremum sits on an endpoint;
            # an unbounded cell with growing regret has infinite gap
            for beta, other in [(b, eh) for b in bg - bh] + [(b, eg) for b in bh - bg]:
                for end in (lo, hi):
                    if math.isfinite(end):
                        gap = _regret(other, beta, end)
                    else:
                        slope = _regret(other, beta, mid + (1.0 if end > 0 else -1.0)) - _regret(other, beta, mid)
                        gap = math.inf if slope > _SLOPE_TOL else _regret(other, beta, mid)
                    if gap > res_eq:
                        res_eq, wit_eq = gap, {"groups": [g, h], "type": _fmt(end), "behavior": beta}
        for t in points:
            compared += 1
            eq, inter = _eo_gaps(eg, eh, t, tie)
            if eq > res_eq:
                res_eq, wit_eq = eq, {"groups": [g, h], "type": t}
            if inter > res_int:
                res_int, wit_int = inter, {"groups": [g, h], "type": t}
        for t in probe.points:
            eq, inter = _eo_gaps(eg, eh, t, tie)
            probe_res = max(probe_res, eq)
    details = {
        "intersection_reading": {
            "verdict": "satisfied" if res_int <= tolerance else "violated",
            "residual": res_int,
            "witness": wit_int,
        },
        "probe_points": len(probe.points),
        "probe_residual": probe_res,
    }
    if isinstance(scenario.preferences, Separable) and scenario.k == 2:
        cuts = {g: threshold(scenario, g) for g in scenario.labels}
        details["thresholds"] = cuts
    return make_report("EO", compared, res_eq, tolerance, wit_eq, details=details)


def _fmt(t: float):
    return t if math.isfinite(t) else ("inf" if t > 0 else "-inf")


# ---------------------------------------------------------------------------
# Envy freeness
# ---------------------------------------------------------------------------


def _sup_difference(upper: Envelope, lower: Envelope) -> tuple[float, float]:
    """``sup_t [upper(t) - lower(t)]`` and a maximizing type (possibly infinite)."""
    cuts = _partition(upper, lower)
    if cuts:
        pts = cuts
    else:
        pts = [0.0]
    diff = lambda t: float(upper.values(t)[0] - lower.values(t)[0])  # noqa: E731
    best_t = pts[0]
    best = diff(best_t)
    for t in pts[1:]:
        v = diff(t)
        if v > best:
            best, best_t = v, t
    for side, anchor in (("left", pts[0]), ("right", pts[-1])):
        _, ub = upper.tail(side)
        _, lb = lower.tail(side)
        slope = ub - lb
        if side == "left":
            slope = -slope
        if slope > _SLOPE_TOL:
            return math.inf, (-math.inf if side == "left" else math.inf)
    return best, best_t


def switch_envelope(scenario: Scenario, own: str, target: str) -> Envelope:
    """Value of a member of ``own`` who adopts ``target``'s signal and decision kernel."""
    return group_envelope(scenario, own, target)


def check_envy_free(scenario: Scenario, probe: TypeProbe | None = None,
                    tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    """Largest gain any type could get by switching to another group's package."""
    probe = type_probe(scenario) if probe is None else probe
    residual, witness, compared, probe_res = 0.0, None, 0, 0.0
    for g in scenario.labels:
        own = group_envelope(scenario, g)
        for h in scenario.labels:
            if h == g:
                continue
            compared += 1
            other = switch_envelope(scenario, g, h)
            gain, t = _sup_difference(other, own)
            gain = max(gain, 0.0)
            if witness is None or gain > residual:
                residual = gain
                witness = {"envious": g, "envied": h, "type": _fmt(t)}
                if math.isfinite(t):
                    witness["values"] = [float(own.values(t)[0]), float(other.values(t)[0])]
            pts = np.array(probe.points)
            probe_res = max(probe_res, float(np.max(other.values(pts) - own.values(pts))))
    details = {"probe_points": len(probe.points), "probe_residual": max(probe_res, 0.0)}
    return make_report("EF", compared, residual, tolerance, witness, details=details)


def _ex_ante(scenario: Scenario, g: str, h: str) -> tuple[float, float]:
    dist = scenario.group(g).distribution
    return (
        expected_envelope(group_envelope(scenario, g), dist),
        expected_envelope(switch_envelope(scenario, g, h), dist),
    )


def check_envy_free_ex_ante(scenario: Scenario, tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    """Two-sided gap between expected own value and expected switched value, under the evaluator's type distribution."""
    residual, witness, compared = 0.0, None, 0
    for g in scenario.labels:
        for h in scenario.labels:
            if h == g:
                continue
            compared += 1
            own, other = _ex_ante(scenario, g, h)
            gap = abs(own - other)
            if witness is None or gap > residual:
                residual, witness = gap, {"evaluator": g, "other": h, "values": [own, other]}
    return make_report("EF-ex-ante", compared, residual, tolerance, witness,
                       details={"measure": "evaluator's own type distribution"})


def check_envy_free_group_level(scenario: Scenario, tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    """One-sided: shortfall of a group's average value below its average value in another group's package."""
    residual, witness, compared = 0.0, None, 0
    for g in scenario.labels:
        for h in scenario.labels:
            if h == g:
                continue
            compared += 1
            own, other = _ex_ante(scenario, g, h)
            gap = max(0.0, other - own)
            if witness is None or gap > residual:
                residual, witness = gap, {"envious": g, "envied": h, "values": [own, other]}
    return make_report("EF-group-level", compared, residual, tolerance, witness)


# ---------------------------------------------------------------------------
# Prejudice freeness and equal consequences
# ---------------------------------------------------------------------------


def ex_post_values(scenario: Scenario, group: str, prevalence) -> dict[int, float]:
    """``v(d, g) = sum_beta h_beta(d, g) * w_g(d, beta)`` at reachable decisions."""
    post = posterior(scenario, group, prevalence)
    w = scenario.weight_table(group)
    return {
        d: float(np.dot(post.rows[d], w[d]))
        for d in range(scenario.k)
        if post.reachable(d)
    }


def check_prejudice_free(scenario: Scenario, prevalences, tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    values = {g: ex_post_values(scenario, g, prevalences[g]) for g in scenario.labels}
    residual, witness, skipped, compared = 0.0, None, [], 0
    for g, h in group_pairs(scenario):
        for d in range(scenario.k):
            if d not in values[g] or d not in values[h]:
                skipped.append(f"{g}/{h} decision {d}: unreachable")
                continue
            compared += 1
            gap = abs(values[g][d] - values[h][d])
            if witness is None or gap > residual:
                residual = gap
                witness = {"groups": [g, h], "decision": d, "values": [values[g][d], values[h][d]]}
    return make_report("PF", compared, residual, tolerance, witness, skipped,
                       details={"ex_post_values": values})


def check_equal_consequences_weights(scenario: Scenario, tolerance: float = ANALYTIC_TOL) -> PredicateReport:
    residual, witness, compared = 0.0, None, 0
    for g, h in group_pairs(scenario):
        compared += 1
        gap = float(np.max(np.abs(scenario.weight_table(g) - scenario.weight_table(h))))
        if witness is None or gap > residual:
            residual, witness = gap, {"groups": [g, h]}
    return make_report("EC", compared, residual, tolerance, witness)
