"""Best responses, thresholds, equilibrium prevalences and value functions.

Payoffs are affine in the type, so each behavior's expected utility is a line
``EU(beta, t) = a[beta] + b[beta] * t``. The value function is the upper
envelope of those lines and every "for all t" question reduces to checking
finitely many breakpoints plus the two tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import AsymmetricBinary, Endogenous, Exogenous, Scenario, Separable, SymmetricBinary
from .statistics import ConfusionTable

_DEDUP = 1e-12


def eu_lines(scenario: Scenario, pref_group: str, package_group: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Intercepts and slopes of ``EU(beta, t)``.

    ``pref_group`` supplies the payoff function, ``package_group`` the signal
    model and decision kernel (they differ when evaluating a group switch).
    """
    package_group = pref_group if package_group is None else package_group
    cond = scenario.conditional(package_group)
    c, m = scenario.coefficients(pref_group)
    return (cond * c).sum(axis=1), (cond * m).sum(axis=1)


def expected_utility(scenario: Scenario, group: str, t: float, beta: int) -> float:
    a, b = eu_lines(scenario, group)
    return float(a[beta] + b[beta] * t)


def _optimal_set(values: np.ndarray, tol: float) -> tuple[int, ...]:
    top = values.max()
    return tuple(int(i) for i in np.flatnonzero(values >= top - tol))


@dataclass(frozen=True)
class BestResponseSet:
    eu: tuple[float, ...]
    optimal: tuple[int, ...]
    selected: int


def best_response(scenario: Scenario, group: str, t: float, tol: float | None = None) -> BestResponseSet:
    tol = scenario.tie_tolerance if tol is None else tol
    a, b = eu_lines(scenario, group)
    values = a + b * t
    optimal = _optimal_set(values, tol)
    return BestResponseSet(tuple(float(v) for v in values), optimal, optimal[0])


def value(scenario: Scenario, group: str, t: float) -> float:
    """Equilibrium expected payoff of a type-``t`` member of ``group``."""
    br = best_response(scenario, group, t)
    return br.eu[br.selected]


def responsiveness(delta0: float, delta1: float, phi: float) -> float:
    return (delta1 + delta0 - 1) * (2 * phi - 1)


class NotThresholdRepresentable:
    """Best responses are not described by one cut point (k > 2)."""

    def __repr__(self) -> str:
        return "NotThresholdRepresentable"


NOT_THRESHOLD = NotThresholdRepresentable()


def _binary_cut(a: np.ndarray, b: np.ndarray, tol: float) -> tuple[float, bool]:
    """Cut point and orientation (True: behavior 1 optimal below the cut)."""
    da, db = a[1] - a[0], b[1] - b[0]
    if abs(db) <= 1e-15:
        return (math.inf if da > tol else -math.inf), True
    return -da / db, db < 0


def threshold(scenario: Scenario, group: str):
    """Type at which behaviors 0 and 1 are equally good.

    Returns +inf when behavior 1 is dominant, -inf when behavior 0 is, and
    NOT_THRESHOLD for k > 2.
    """
    if scenario.k != 2:
        return NOT_THRESHOLD
    prefs = scenario.preferences
    sig = scenario.group(group).signal
    if isinstance(prefs, Separable):
        d0, d1 = scenario.algorithm.binary(group)
        if isinstance(sig, SymmetricBinary):
            return prefs.r * (d0 + d1 - 1) * (2 * sig.phi - 1)
        if isinstance(sig, AsymmetricBinary):
            return prefs.r * (d0 + d1 - 1) * (sig.phi1 + sig.phi0 - 1)
    a, b = eu_lines(scenario, group)
    return _binary_cut(a, b, scenario.tie_tolerance)[0]


# ---------------------------------------------------------------------------
# Upper envelope of affine lines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    optimal: tuple[int, ...]

    @property
    def selected(self) -> int:
        return self.optimal[0]


@dataclass(frozen=True)
class Envelope:
    a: tuple[float, ...]
    b: tuple[float, ...]
    segments: tuple[Segment, ...]
    candidates: tuple[float, ...]  # every pairwise crossing, sorted

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(s.hi for s in self.segments[:-1])

    def values(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return (np.array(self.a)[None, :] + np.array(self.b)[None, :] * t[:, None]).max(axis=1)

    def tail(self, side: str) -> tuple[float, float]:
        """Intercept and slope of the envelope's line as t -> -inf / +inf."""
        seg = self.segments[0] if side == "left" else self.segments[-1]
        beta = seg.selected
        return self.a[beta], self.b[beta]


def _dedup(points: list[float]) -> list[float]:
    out: list[float] = []
    for p in sorted(points):
        if not out or abs(p - out[-1]) > _DEDUP * max(1.0, abs(p)):
            out.append(p)
    return out


def envelope(a, b, tol: float) -> Envelope:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = len(a)
    crossings = []
    for i in range(k):
        for j in range(i + 1, k):
            if b[i] != b[j]:
                t = (a[j] - a[i]) / (b[i] - b[j])
                if math.isfinite(t):
                    crossings.append(float(t))
    pts = _dedup(crossings)
    edges = [-math.inf, *pts, math.inf]
    segments: list[Segment] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if math.isinf(lo) and math.isinf(hi):
            probe = 0.0
        elif math.isinf(lo):
            probe = hi - 1.0
        elif math.isinf(hi):
            probe = lo + 1.0
        else:
            probe = 0.5 * (lo + hi)
        opt = _optimal_set(a + b * probe, tol)
        if segments and segments[-1].optimal == opt:
            segments[-1] = Segment(segments[-1].lo, hi, opt)
        else:
            segments.append(Segment(lo, hi, opt))
    return Envelope(tuple(map(float, a)), tuple(map(float, b)), tuple(segments), tuple(pts))


def group_envelope(scenario: Scenario, pref_group: str, package_group: str | None = None) -> Envelope:
    a, b = eu_lines(scenario, pref_group, package_group)
    return envelope(a, b, scenario.tie_tolerance)


def behavior_masses(env: Envelope, dist, k: int) -> np.ndarray:
    """Population share selecting each behavior (ties go to the smallest index)."""
    mass = np.zeros(k)
    for seg in env.segments:
        mass[seg.selected] += dist.cdf(seg.hi) - dist.cdf(seg.lo)
    return mass


def expected_envelope(env: Envelope, dist) -> float:
    """``E_{t ~ dist}[max_beta EU(beta, t)]`` computed piecewise in closed form."""
    total = 0.0
    for seg in env.segments:
        beta = seg.selected
        mass = dist.cdf(seg.hi) - dist.cdf(seg.lo)
        if mass <= 0.0:
            continue
        total += env.a[beta] * mass + env.b[beta] * dist.partial_mean(seg.lo, seg.hi)
    return total


# ---------------------------------------------------------------------------
# Equilibrium
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Regularity:
    generic_uniqueness: bool
    each_behavior_optimal: bool

    @property
    def holds(self) -> bool:
        return self.generic_uniqueness and self.each_behavior_optimal


def check_regularity(scenario: Scenario, group: str) -> Regularity:
    env = group_envelope(scenario, group)
    dist = scenario.group(group).distribution
    unique = True
    for seg in env.segments:
        if len(seg.optimal) > 1 and dist.cdf(seg.hi) - dist.cdf(seg.lo) > 0:
            unique = False
    masses = behavior_masses(env, dist, scenario.k)
    return Regularity(unique, bool(np.all(masses > 0)))


@dataclass(frozen=True)
class GroupEquilibrium:
    group: str
    source: str  # "exogenous" or "endogenous"
    prevalence: tuple[float, ...]
    joint: tuple[tuple[float, ...], ...]  # Pr[beta, d]
    threshold: float | None
    ones_below: bool | None
    responsiveness: float | None
    confusion: ConfusionTable | None
    reward: float | None  # R* = Pr[d = 1]
    punish: float | None  # P* = Pr[d = 0]
    regularity: Regularity

    def to_dict(self) -> dict:
        out = {
            "group": self.group,
            "source": self.source,
            "prevalence": list(self.prevalence),
            "joint": [list(r) for r in self.joint],
            "threshold": _json_float(self.threshold),
            "ones_below_threshold": self.ones_below,
            "responsiveness": self.responsiveness,
            "regularity": {
                "generic_uniqueness": self.regularity.generic_uniqueness,
                "each_behavior_optimal": self.regularity.each_behavior_optimal,
            },
        }
        if self.confusion is not None:
            c = self.confusion
            out["confusion"] = {"W1": c.W1, "L1": c.L1, "L0": c.L0, "W0": c.W0}
            out["reward"] = self.reward
            out["punish"] = self.punish
        return out


def _json_float(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class EquilibriumProfile:
    groups: tuple[GroupEquilibrium, ...]

    def __getitem__(self, label: str) -> GroupEquilibrium:
        for g in self.groups:
            if g.group == label:
                return g
        raise KeyError(label)

    def prevalences(self) -> dict[str, np.ndarray]:
        return {g.group: np.array(g.prevalence) for g in self.groups}

    def to_dict(self) -> dict:
        return {g.group: g.to_dict() for g in self.groups}


def equilibrium_prevalence(scenario: Scenario, group: str) -> np.ndarray:
    g = scenario.group(group)
    if isinstance(g.prevalence, Exogenous):
        return g.prevalence.distribution(scenario.k)
    env = group_envelope(scenario, group)
    return behavior_masses(env, g.distribution, scenario.k)


def equilibrium_profile(scenario: Scenario) -> EquilibriumProfile:
    """Per-group equilibrium. Payoffs do not depend on others' choices, so no fixed point is needed."""
    out = []
    for g in scenario.groups:
        label = g.id
        source = "endogenous" if isinstance(g.prevalence, Endogenous) else "exogenous"
        prevalence = equilibrium_prevalence(scenario, label)
        joint = prevalence[:, None] * scenario.conditional(label)
        cut = ones_below = rho = conf = reward = punish = None
        if scenario.k == 2:
            a, b = eu_lines(scenario, label)
            t = threshold(scenario, label)
            _, ones_below = _binary_cut(a, b, scenario.tie_tolerance)
            cut = float(t)
            cond = scenario.conditional(label)
            rho = float(cond[1, 1] - cond[0, 1])
            conf = ConfusionTable.from_matrix(joint)
            reward = conf.W1 + conf.L0
            punish = conf.L1 + conf.W0
        out.append(
            GroupEquilibrium(
                group=label,
                source=source,
                prevalence=tuple(float(x) for x in prevalence),
                joint=tuple(tuple(float(x) for x in row) for row in joint),
                threshold=cut,
                ones_below=ones_below,
                responsiveness=rho,
                confusion=conf,
                reward=reward,
                punish=punish,
                regularity=check_regularity(scenario, label),
            )
        )
    return EquilibriumProfile(tuple(out))


def separable_cells(r: float, delta0: float, delta1: float, phi: float, dist) -> ConfusionTable:
    """Equilibrium cells for separable payoffs in closed form (low types choose behavior 1)."""
    mass1 = dist.cdf(r * responsiveness(delta0, delta1, phi))
    return ConfusionTable(
        W1=mass1 * (phi * delta1 + (1 - phi) * (1 - delta0)),
        L1=mass1 * (phi * (1 - delta1) + (1 - phi) * delta0),
        L0=(1 - mass1) * ((1 - phi) * delta1 + phi * (1 - delta0)),
        W0=(1 - mass1) * ((1 - phi) * (1 - delta1) + phi * delta0),
    )
