"""Desk-scale reproduction of the equivalence results, counterexamples and worked examples.

Each case returns a VerificationCase: a list of claims, each comparing a
computed value with a stated one (``claimed``) or with an independent
computation (``derived``). A claim whose stated value the computation
contradicts, while the headline conclusion still holds, is marked
``discrepancy`` and does not fail the case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import io as scenario_io
from .equilibrium import best_response, equilibrium_profile, eu_lines, group_envelope, threshold, value
from .fairness_statistical import check_ab, check_erb, check_pp, resolve_prevalences
from .model import (
    AffineTable,
    AsymmetricBinary,
    Endogenous,
    Exogenous,
    General,
    Group,
    InputError,
    Logistic,
    Normal,
    NormalizedError,
    ReviewerPreferences,
    Scenario,
    Separable,
    StochasticAlgorithm,
    SymmetricBinary,
    Uniform,
    symmetric_general,
)
from .reviewer import verify_reviewer_equivalence
from .search import Infeasible, project_to_erb
from .statistics import posterior
from .welfare import (
    _sup_difference,
    check_envy_free,
    check_equal_opportunity,
    check_group_independence,
    check_prejudice_free,
    type_probe,
)

PASS, FAIL, DISCREPANCY, INFO = "pass", "fail", "discrepancy", "info"
CLAIMED, DERIVED = "claimed", "derived"


@dataclass(frozen=True)
class Claim:
    description: str
    anchor: str
    computed: object
    expected: object = None
    provenance: str = DERIVED
    status: str = PASS

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "anchor": self.anchor,
            "computed": _plain(self.computed),
            "expected": _plain(self.expected),
            "provenance": self.provenance,
            "status": self.status,
        }


def _plain(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        x = x.item()
    if isinstance(x, float):
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


@dataclass
class VerificationCase:
    name: str
    parameters: dict
    claims: list[Claim] = field(default_factory=list)
    witnesses: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.claims)

    def add(self, claim: Claim) -> Claim:
        self.claims.append(claim)
        return claim

    def check(self, description, anchor, computed, expected, tol=1e-9, provenance=DERIVED) -> Claim:
        ok = _close(computed, expected, tol)
        return self.add(Claim(description, anchor, computed, expected, provenance, PASS if ok else FAIL))

    def compare(self, description, anchor, computed, claimed, tol=1e-9) -> Claim:
        """Stated value that may legitimately disagree with the computation."""
        ok = _close(computed, claimed, tol)
        return self.add(Claim(description, anchor, computed, claimed, CLAIMED, PASS if ok else DISCREPANCY))

    def assert_true(self, description, anchor, condition: bool, computed=None, provenance=DERIVED) -> Claim:
        return self.add(Claim(description, anchor, computed if computed is not None else bool(condition),
                              True if computed is None else None, provenance, PASS if condition else FAIL))

    def info(self, description, anchor, computed) -> Claim:
        return self.add(Claim(description, anchor, computed, None, DERIVED, INFO))

    def witness(self, label: str, scenario: Scenario, **extra) -> None:
        self.witnesses.append({"label": label, "scenario": scenario_io.scenario_to_dict(scenario), **extra})

    def to_dict(self) -> dict:
        return {
            "case": self.name,
            "passed": self.passed,
            "parameters": _plain(self.parameters),
            "claims": [c.to_dict() for c in self.claims],
            "witnesses": _plain(self.witnesses),
        }

    def render(self) -> str:
        lines = [f"== {self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.claims:
            exp = "" if c.expected is None else f" (expected {_short(c.expected)})"
            lines.append(f"  [{c.status:11}] {c.description}: {_short(c.computed)}{exp}")
        return "\n".join(lines)


def _short(x) -> str:
    x = _plain(x)
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _close(a, b, tol) -> bool:
    if isinstance(a, (bool, np.bool_)) or isinstance(b, (bool, np.bool_)) or isinstance(a, str) or isinstance(b, str):
        return a == b
    if a is None or b is None:
        return a is b
    a, b = float(a), float(b)
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol


# ---------------------------------------------------------------------------
# Random scenario generation
# ---------------------------------------------------------------------------


def _random_distribution(rng: np.random.Generator):
    mu = float(rng.uniform(-1.0, 1.0))
    scale = float(rng.uniform(0.5, 2.0))
    return Logistic(mu, scale) if rng.integers(2) == 0 else Normal(mu, scale)


def random_binary_scenario(rng: np.random.Generator, *, erb: bool = False) -> Scenario:
    """Two groups, separable payoffs, endogenous prevalence, independent primitives."""
    phi = {g: float(rng.uniform(0.55, 0.99)) for g in ("X", "Y")}
    deltas = {g: tuple(float(x) for x in rng.uniform(0.05, 0.95, 2)) for g in ("X", "Y")}
    if erb:
        phi["Y"], deltas["Y"] = phi["X"], deltas["X"]
    r = float(rng.uniform(0.5, 2.0))
    groups = tuple(Group(g, _random_distribution(rng), SymmetricBinary(phi[g]), Endogenous()) for g in ("X", "Y"))
    return Scenario(2, groups, Separable(r), StochasticAlgorithm.from_binary(deltas))


def _random_stochastic(rng, k, diag=0.0):
    m = rng.uniform(0.05, 1.0, (k, k)) + diag * np.eye(k)
    return m / m.sum(axis=1, keepdims=True)


def random_ternary_erb_scenario(rng: np.random.Generator) -> Scenario:
    """k = 3, group-independent affine payoffs, ERB by construction.

    The cleaner group's kernel is inverse(Phi_clean) @ Phi_noisy @ D_noisy. The
    garbling factor is stochastic for symmetric signals; clipping only removes roundoff.
    """
    lo, hi = sorted(float(x) for x in rng.uniform(0.45, 0.95, 2))
    phi_x, phi_y = symmetric_general(3, lo), symmetric_general(3, hi)
    dx = _random_stochastic(rng, 3, diag=1.0)
    dy = np.linalg.solve(phi_y.matrix(), phi_x.matrix() @ dx)
    dy = np.clip(dy, 0.0, 1.0)
    dy = dy / dy.sum(axis=1, keepdims=True)
    c = rng.uniform(-1.0, 1.0, (3, 3))
    m = -np.repeat(rng.uniform(0.0, 1.0, (3, 1)), 3, axis=1)
    prefs = AffineTable.from_arrays({"X": (c, m), "Y": (c, m)})
    groups = (
        Group("X", _random_distribution(rng), phi_x, Endogenous()),
        Group("Y", _random_distribution(rng), phi_y, Endogenous()),
    )
    return Scenario(3, groups, prefs, StochasticAlgorithm({"X": dx, "Y": dy}))


# ---------------------------------------------------------------------------
# Cases
# ---------------------------------------------------------------------------


def verify_theorem_1(trials: int = 500, seed: int = 42, tolerance: float = 1e-6,
                     projected: int = 100, ternary: int = 100) -> VerificationCase:
    if trials < 1:
        raise InputError("trials must be at least 1")
    case = VerificationCase("theorem1", {"trials": trials, "seed": seed, "tolerance": tolerance,
                                         "projected": projected, "ternary": ternary})
    anchor = "ERB iff envy freeness under group independence"
    rng = np.random.default_rng(seed)
    agree = ef_eo = erb_count = 0
    for i in range(trials):
        sc = random_binary_scenario(rng, erb=(i % 4 == 0))
        prev = resolve_prevalences(sc, "equilibrium")
        erb = check_erb(sc, prev, tolerance).passed
        ef = check_envy_free(sc, tolerance=tolerance).passed
        erb_count += erb
        if erb == ef:
            agree += 1
        elif len(case.witnesses) < 5:
            case.witness(f"ERB/EF disagreement, trial {i}", sc, erb=erb, ef=ef)
        if ef:
            if check_equal_opportunity(sc, tolerance=tolerance).passed:
                ef_eo += 1
            elif len(case.witnesses) < 5:
                case.witness(f"EF without EO, trial {i}", sc)
        else:
            ef_eo += 1
    case.info("ERB-satisfying binary trials", anchor, erb_count)
    case.check("binary trials where ERB and EF verdicts agree", anchor, agree, trials, 0)
    case.check("binary trials consistent with EF implying EO", "envy freeness implies equal opportunity",
               ef_eo, trials, 0)

    confirmed = attempts = 0
    while confirmed < projected and attempts < 50 * projected:
        attempts += 1
        sc = random_binary_scenario(rng)
        alg = project_to_erb(sc, "Y")
        if isinstance(alg, Infeasible):
            continue
        sc = sc.with_algorithm(alg)
        prev = resolve_prevalences(sc, "equilibrium")
        erb = check_erb(sc, prev, 1e-12)
        ef = check_envy_free(sc, tolerance=tolerance)
        if erb.passed and ef.passed:
            confirmed += 1
        else:
            case.witness("projected scenario failing ERB or EF", sc, erb=erb.residual, ef=ef.residual)
            break
    case.check("ERB-projected scenarios confirmed envy free", "ERB implies envy freeness", confirmed, projected, 0)

    ok = 0
    for i in range(ternary):
        sc = random_ternary_erb_scenario(rng)
        prev = resolve_prevalences(sc, "equilibrium")
        erb = check_erb(sc, prev, tolerance).passed
        ef = check_envy_free(sc, tolerance=tolerance).passed
        if erb and ef:
            ok += 1
        elif len(case.witnesses) < 5:
            case.witness(f"ternary ERB scenario not envy free, trial {i}", sc)
    case.check("k = 3 ERB-satisfying scenarios confirmed envy free", "ERB implies envy freeness in any k-SCP",
               ok, ternary, 0)

    sc = ternary_converse_counterexample()
    prev = resolve_prevalences(sc, "exogenous")
    erb, ef = check_erb(sc, prev, tolerance), check_envy_free(sc, tolerance=tolerance)
    case.assert_true("k = 3: envy free algorithm violating ERB (converse fails)",
                     "converse does not extend beyond binary problems",
                     ef.passed and not erb.passed, {"EF": ef.verdict, "ERB": erb.verdict, "ERB residual": erb.residual})
    return case


def ternary_converse_counterexample() -> Scenario:
    """Payoff depends only on reaching decision 1; Y's kernel swaps decisions 0 and 2."""
    k = 3
    c = np.zeros((k, k))
    c[:, 1] = 1.0
    m = np.zeros((k, k))
    m[1, :] = -1.0
    prefs = AffineTable.from_arrays({"X": (c, m), "Y": (c, m)})
    phi = symmetric_general(3, 0.6)
    swap = ((0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0))
    groups = tuple(Group(g, Logistic(0.0, 1.0), phi, Exogenous((1 / 3, 1 / 3, 1 / 3))) for g in ("X", "Y"))
    ident = tuple(tuple(1.0 if i == j else 0.0 for j in range(k)) for i in range(k))
    return Scenario(k, groups, prefs, StochasticAlgorithm({"X": ident, "Y": swap}))


def prop2_scenario(m: int, phi: float, reading: str = "behavior_and_decision") -> Scenario:
    """The ternary-or-larger construction; behavior/decision label 1 is the rewarded one.

    ``reading`` selects the payoff: reward iff behavior and decision are both 1,
    or reward iff the decision is 1.
    """
    if not (isinstance(m, int) and m >= 3):
        raise InputError("m must be an integer >= 3")
    if not 1.0 / m < phi < 1.0:
        raise InputError(f"phi must lie in (1/{m}, 1)")
    c = np.zeros((m, m))
    if reading == "behavior_and_decision":
        c[1, 1] = 1.0
    elif reading == "decision_only":
        c[:, 1] = 1.0
    else:
        raise InputError(f"unknown utility reading {reading!r}")
    zeros = np.zeros((m, m))
    prefs = AffineTable.from_arrays({"X": (c, zeros), "Y": (c, zeros)})
    ident = np.eye(m)
    dy = np.full((m, m), 1.0 / (m - 1))
    np.fill_diagonal(dy, 0.0)
    dy[1] = ident[1]
    signal = symmetric_general(m, phi)
    uniform = tuple([1.0 / m] * m)
    groups = tuple(Group(g, Logistic(0.0, 1.0), signal, Exogenous(uniform)) for g in ("X", "Y"))
    return Scenario(m, groups, prefs, StochasticAlgorithm({"X": ident, "Y": dy}))


def prop2_binary_scenario(phi: float = 0.8) -> Scenario:
    """Binary construction with group-dependent payoffs: X likes (0,0), Y likes (1,1)."""
    c_x = np.array([[1.0, 0.0], [0.0, -1.0]])
    c_y = np.array([[-1.0, 0.0], [0.0, 1.0]])
    z = np.zeros((2, 2))
    prefs = AffineTable.from_arrays({"X": (c_x, z), "Y": (c_y, z)})
    groups = tuple(Group(g, Logistic(0.0, 1.0), SymmetricBinary(phi), Exogenous(0.5)) for g in ("X", "Y"))
    return Scenario(2, groups, prefs, StochasticAlgorithm.from_binary({"X": (1.0, 0.0), "Y": (0.0, 1.0)}))


def verify_prop_2(m: int = 3, phi: float = 0.6, tolerance: float = 1e-9) -> VerificationCase:
    case = VerificationCase("prop2", {"m": m, "phi": phi, "tolerance": tolerance})
    anchor = "equal opportunity without ERB beyond binary problems"
    off = (1 - phi) / (m - 1)
    for reading in ("behavior_and_decision", "decision_only"):
        sc = prop2_scenario(m, phi, reading)
        a = {g: eu_lines(sc, g)[0] for g in sc.labels}
        eo = check_equal_opportunity(sc, tolerance=tolerance)
        ef = check_envy_free(sc, tolerance=tolerance)
        tag = f"[{reading.replace('_', ' ')}]"
        case.assert_true(f"{tag} equal opportunity satisfied", anchor, eo.passed, eo.verdict)
        case.compare(f"{tag} EU_X(behavior 1)", "payoff of choosing 1 in group X", a["X"][1], phi)
        case.compare(f"{tag} EU_X(behavior 0)", "payoff of other behaviors in group X", a["X"][0], off)
        case.compare(f"{tag} EU_Y(behavior 1)", "payoff of choosing 1 in group Y", a["Y"][1], phi)
        case.compare(f"{tag} EU_Y(behavior 0)", "payoff of other behaviors in group Y", a["Y"][0], off)
        case.add(Claim(f"{tag} envy freeness", "stated alongside equal opportunity", ef.verdict, "satisfied",
                       CLAIMED, PASS if ef.passed else DISCREPANCY))
    sc = prop2_scenario(m, phi)
    prev = resolve_prevalences(sc)
    erb = check_erb(sc, prev, tolerance)
    case.assert_true("ERB violated with residual >= 0.5" if m == 3 else "ERB violated", anchor,
                     (not erb.passed) and (m != 3 or erb.residual >= 0.5 - 1e-12), erb.residual)
    cond = {g: sc.conditional(g) for g in sc.labels}
    top = m - 1
    case.check(f"Pr[d={top} | behavior {top}, X]", "brute-force enumeration", cond["X"][top, top], phi)
    case.check(f"Pr[d={top} | behavior {top}, Y]", "brute-force enumeration",
               cond["Y"][top, top], _enumerate_correct(m, phi, top))
    for beta in range(m):
        if beta == 1:
            continue
        case.compare(f"Pr[d={beta} | behavior {beta}, Y]", "accuracy of group Y off behavior 1",
                     cond["Y"][beta, beta], 0.0)
    ab = check_ab(sc, prev, tolerance)
    case.assert_true("accuracy balance violated", "AB compares diagonal accuracy", not ab.passed, ab.residual)

    sc2 = prop2_binary_scenario()
    gi = check_group_independence(sc2.preferences)
    case.check("binary construction: group-independence residual", "payoffs violating group independence",
               gi.residual, 2.0)
    erb2 = check_erb(sc2, resolve_prevalences(sc2), tolerance)
    ef2 = check_envy_free(sc2, tolerance=tolerance)
    eo2 = check_equal_opportunity(sc2, tolerance=tolerance)
    case.assert_true("binary construction: ERB violated", "binary construction", not erb2.passed, erb2.residual)
    case.assert_true("binary construction: envy free", "binary construction", ef2.passed, ef2.verdict)
    case.add(Claim("binary construction: equal opportunity", "binary construction", eo2.verdict, "satisfied",
                   CLAIMED, PASS if eo2.passed else DISCREPANCY))
    return case


def _enumerate_correct(m: int, phi: float, beta: int) -> float:
    """Pr[d = beta | beta] for group Y's kernel by looping over signals."""
    off = (1 - phi) / (m - 1)
    total = 0.0
    for s in range(m):
        ps = phi if s == beta else off
        if s == 1:
            pd = 1.0 if beta == 1 else 0.0
        else:
            pd = 0.0 if beta == s else 1.0 / (m - 1)
        total += ps * pd
    return total


def _binary_pf_pp_scenario(pi_x, pi_y, phi_x, phi_y, dx, dy, w) -> Scenario:
    groups = (
        Group("X", Logistic(0.0, 1.0), SymmetricBinary(phi_x), Exogenous(pi_x)),
        Group("Y", Logistic(0.0, 1.0), SymmetricBinary(phi_y), Exogenous(pi_y)),
    )
    return Scenario(2, groups, NormalizedError({"X": 0.0, "Y": 0.0}, {"X": 0.0, "Y": 0.0}),
                    StochasticAlgorithm.from_binary({"X": dx, "Y": dy}), ex_post_weights={"X": w[0], "Y": w[1]})


def find_pf_pp_divergence(w=(2.0, 1.0), tolerance: float = 1e-9, want: str = "pf_only"):
    """Grid search for a binary scenario where PF and PP verdicts differ.

    ``want`` is ``pf_only`` (PF holds, PP fails) or ``pp_only``.
    """
    grid = [round(0.1 * i, 10) for i in range(1, 10)]
    deltas = [(0.0, 1.0), (1.0, 1.0), (0.8, 0.7), (1.0, 0.0), (0.5, 0.5)]
    for phi in (1.0, 0.8, 0.6):
        for dx in deltas:
            for pi_x in grid:
                for pi_y in grid:
                    sc = _binary_pf_pp_scenario(pi_x, pi_y, phi, phi, dx, dx, w)
                    prev = resolve_prevalences(sc)
                    pf = check_prejudice_free(sc, prev, tolerance)
                    pp = check_pp(sc, prev, tolerance)
                    if (want == "pf_only" and pf.passed and not pp.passed) or (
                        want == "pp_only" and pp.passed and not pf.passed
                    ):
                        return sc, pf, pp
    return None


def verify_theorem_2(trials: int = 500, seed: int = 42, tolerance: float = 1e-9) -> VerificationCase:
    if trials < 1:
        raise InputError("trials must be at least 1")
    case = VerificationCase("theorem2", {"trials": trials, "seed": seed, "tolerance": tolerance})
    anchor = "prejudice freeness iff predictive parity exactly under equal consequences"
    rng = np.random.default_rng(seed)
    agree = pp_true = 0
    for i in range(trials):
        w = float(rng.uniform(0.5, 2.0))
        phi_x = float(rng.uniform(0.55, 0.99))
        dx = tuple(float(x) for x in rng.uniform(0.05, 0.95, 2))
        pi_x = float(rng.uniform(0.05, 0.95))
        if i % 4 == 0:
            phi_y, dy, pi_y = phi_x, dx, pi_x
        else:
            phi_y = float(rng.uniform(0.55, 0.99))
            dy = tuple(float(x) for x in rng.uniform(0.05, 0.95, 2))
            pi_y = float(rng.uniform(0.05, 0.95))
        sc = _binary_pf_pp_scenario(pi_x, pi_y, phi_x, phi_y, dx, dy, (w, w))
        prev = resolve_prevalences(sc)
        pf, pp = check_prejudice_free(sc, prev, tolerance), check_pp(sc, prev, tolerance)
        pp_true += pp.passed
        if pf.passed == pp.passed:
            agree += 1
        elif len(case.witnesses) < 5:
            case.witness(f"PF/PP disagreement under equal weights, trial {i}", sc)
    case.info("trials satisfying predictive parity", anchor, pp_true)
    case.check("equal-weight trials where PF and PP agree", anchor, agree, trials, 0)

    found = find_pf_pp_divergence((2.0, 1.0), tolerance, "pf_only")
    if found is None:
        case.assert_true("w = (2, 1): PF holds while PP fails", anchor, False, "no witness on grid")
    else:
        sc, pf, pp = found
        h = {g: posterior(sc, g, resolve_prevalences(sc)[g]) for g in sc.labels}
        d = pf.witness["decision"] if pf.witness else 1
        case.assert_true("w = (2, 1): PF holds while PP fails", anchor, True,
                         {"h1(X)": h["X"].h(d, 1), "h1(Y)": h["Y"].h(d, 1), "decision": d})
        case.witness("PF without PP", sc)
    reverse = find_pf_pp_divergence((2.0, 1.0), tolerance, "pp_only")
    case.info("w = (2, 1): PP holds while PF fails", anchor, reverse is not None)

    sc3, pf3, pp3 = ternary_pf_without_pp()
    case.info("k = 3, scalar weights: PF holds while PP fails (binary hypothesis needed)",
              "equivalence requires a binary problem",
              {"PF": pf3.verdict, "PP": pp3.verdict, "PP residual": pp3.residual})
    return case


def ternary_pf_without_pp(tolerance: float = 1e-9):
    """Posteriors agree on behavior 1 but differ elsewhere; searched over prevalences."""
    k = 3
    phi = symmetric_general(k, 0.7)
    merge = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0))
    grid = [0.1 * i for i in range(1, 9)]
    for p1 in grid:
        for p0 in grid:
            p2 = 1.0 - p1 - p0
            if p2 <= 1e-9 or abs(p0 - p2) < 1e-9:
                continue
            groups = (
                Group("X", Logistic(0.0, 1.0), phi, Exogenous((p0, p1, p2))),
                Group("Y", Logistic(0.0, 1.0), phi, Exogenous((p2, p1, p0))),
            )
            sc = Scenario(k, groups, NormalizedError({"X": 0.0, "Y": 0.0}, {"X": 0.0, "Y": 0.0}),
                          StochasticAlgorithm({"X": merge, "Y": merge}), ex_post_weights={"X": 1.0, "Y": 1.0})
            prev = resolve_prevalences(sc)
            pf, pp = check_prejudice_free(sc, prev, tolerance), check_pp(sc, prev, tolerance)
            if pf.passed and not pp.passed:
                return sc, pf, pp
    raise RuntimeError("no ternary PF-without-PP scenario on the grid")


def _raw_outcome_preferences(lam: dict, gamma: dict) -> AffineTable:
    """Raw outcome table: behavior 1 earns lam on decision 0; behavior 0 earns t, plus gamma on decision 1."""
    tables = {}
    for g in lam:
        c = np.array([[0.0, gamma[g]], [lam[g], 0.0]])
        m = np.array([[1.0, 1.0], [0.0, 0.0]])
        tables[g] = (c, m)
    return AffineTable.from_arrays(tables)


def group_dependent_witness(pi_x: float = 0.3, pi_y: float = 0.6) -> Scenario:
    prefs = _raw_outcome_preferences({"X": 1.0, "Y": 0.0}, {"X": 0.0, "Y": 1.0})
    groups = (
        Group("X", Logistic(0.0, 1.0), SymmetricBinary(1.0), Exogenous(pi_x)),
        Group("Y", Logistic(0.0, 1.0), SymmetricBinary(1.0), Exogenous(pi_y)),
    )
    # X always receives decision 0, Y always decision 1
    return Scenario(2, groups, prefs, StochasticAlgorithm.from_binary({"X": (1.0, 0.0), "Y": (0.0, 1.0)}))


def normalized_error_witness(pi_x: float = 0.3, pi_y: float = 0.6, phi_x: float = 1.0,
                     delta_x: tuple[float, float] = (0.0, 1.0)) -> Scenario:
    groups = (
        Group("X", Logistic(0.0, 1.0), SymmetricBinary(phi_x), Exogenous(pi_x)),
        Group("Y", Logistic(0.0, 1.0), SymmetricBinary(1.0), Exogenous(pi_y)),
    )
    prefs = NormalizedError({"X": 0.0, "Y": 0.0}, {"X": 2.0, "Y": 2.0})
    return Scenario(2, groups, prefs, StochasticAlgorithm.from_binary({"X": delta_x, "Y": (0.5, 0.5)}))


def verify_appendix_e(tolerance: float = 1e-9) -> VerificationCase:
    case = VerificationCase("appendixE", {"tolerance": tolerance})
    anchor = "envy freeness neither implies nor is implied by ERB"

    sc = group_dependent_witness()
    ef = check_envy_free(sc, tolerance=tolerance)
    erb = check_erb(sc, resolve_prevalences(sc), tolerance)
    case.assert_true("case (i): group-dependent payoffs, envy free", anchor, ef.passed, ef.verdict)
    case.assert_true("case (i): ERB violated at prevalences 0.3 / 0.6", anchor, not erb.passed, erb.residual)
    same = group_dependent_witness(0.45, 0.45)
    erb_same = check_erb(same, resolve_prevalences(same), tolerance)
    case.info("case (i): ERB at equal prevalences", "conditional rates do not depend on prevalence",
              erb_same.verdict)

    sc = normalized_error_witness()
    v_y = [value(sc, "Y", t) for t in type_probe(sc).points]
    case.compare("case (ii) as stated: every Y value equals 1", "expected payoff equal to 1",
                 max(abs(v - 1.0) for v in v_y), 0.0)
    ef = check_envy_free(sc, tolerance=tolerance)
    case.add(Claim("case (ii) as stated: envy freeness", anchor, ef.verdict, "satisfied", CLAIMED,
                   PASS if ef.passed else DISCREPANCY))
    case.info("case (ii) as stated: value of a Y member using X's kernel", "group switch",
              float(group_envelope(sc, "Y", "X").values(0.0)[0]))

    fixed = normalized_error_witness(delta_x=(0.5, 1.0))
    ef = check_envy_free(fixed, tolerance=tolerance)
    erb = check_erb(fixed, resolve_prevalences(fixed), tolerance)
    case.assert_true("case (ii) with X kernel (0.5, 1): envy free", anchor, ef.passed, ef.verdict)
    case.assert_true("case (ii) with X kernel (0.5, 1): ERB violated", anchor, not erb.passed, erb.residual)
    equal = normalized_error_witness(0.45, 0.45, delta_x=(0.5, 1.0))
    erb_equal = check_erb(equal, resolve_prevalences(equal), tolerance)
    case.add(Claim("case (ii): ERB at equal prevalences", "violated unless prevalences are equal",
                   erb_equal.verdict, "satisfied", CLAIMED, PASS if erb_equal.passed else DISCREPANCY))
    case.info("ERB without envy freeness", "under the own-payoff group switch, equal conditional "
              "rates give identical values, so no binary witness exists", "not exhibited")
    return case


def arrovian_scenario(phi: float, dist_x, dist_y, r: float = 1.0, algorithm: str = "discriminatory") -> Scenario:
    if algorithm == "discriminatory":
        alg = StochasticAlgorithm({"X": ((1.0, 0.0), (1.0, 0.0)), "Y": ((1.0, 0.0), (0.0, 1.0))})
    else:  # group-constant: X always 0, Y always 1
        alg = StochasticAlgorithm({"X": ((1.0, 0.0), (1.0, 0.0)), "Y": ((0.0, 1.0), (0.0, 1.0))})
    groups = (
        Group("X", dist_x, SymmetricBinary(phi), Endogenous()),
        Group("Y", dist_y, SymmetricBinary(phi), Endogenous()),
    )
    return Scenario(2, groups, Separable(r), alg)


def _rates(joint: np.ndarray) -> dict:
    def ratio(a, b):
        return a / b if b > 1e-12 else float("nan")

    return {
        "FPR": ratio(joint[0, 1], joint[0].sum()),
        "FNR": ratio(joint[1, 0], joint[1].sum()),
        "PPV": ratio(joint[1, 1], joint[:, 1].sum()),
        "NPV": ratio(joint[0, 0], joint[:, 0].sum()),
        "FN mass": joint[1, 0],
        "FP mass": joint[0, 1],
    }


def simulate_arrovian(sc: Scenario, n: int, seed: int) -> dict[str, np.ndarray]:
    """Monte-Carlo joint tables: draw types, best-respond, draw signals and decisions."""
    rng = np.random.Generator(np.random.PCG64(seed))
    out = {}
    for g in sc.labels:
        grp = sc.group(g)
        t = grp.distribution.quantile(rng.random(n))
        a, b = eu_lines(sc, g)
        beta = ((a[1] + b[1] * t) > (a[0] + b[0] * t)).astype(int)
        phi = sc.signal_matrix(g)
        s = (rng.random(n) < phi[beta, 1]).astype(int)
        D = sc.decision_matrix(g)
        d = (rng.random(n) < D[s, 1]).astype(int)
        joint = np.zeros((2, 2))
        np.add.at(joint, (beta, d), 1.0)
        out[g] = joint / n
    return out


def verify_arrovian(phi: float = 0.8, dist_x=None, dist_y=None, r: float = 1.0, seed: int = 42,
                    tolerance: float = 1e-9, mc_draws: int = 200_000) -> VerificationCase:
    dist_x = Uniform(-1.0, 1.0) if dist_x is None else dist_x
    dist_y = Uniform(0.0, 2.0) if dist_y is None else dist_y
    if not 0.5 < phi <= 1.0:
        raise InputError("phi must lie in (1/2, 1]")
    case = VerificationCase("arrovian", {"phi": phi, "F_X": dist_x.to_dict(), "F_Y": dist_y.to_dict(),
                                         "r": r, "seed": seed})
    anchor = "discriminatory algorithm with endogenous behavior"
    sc = arrovian_scenario(phi, dist_x, dist_y, r)
    prof = equilibrium_profile(sc)
    pi_x, pi_y = prof["X"].prevalence[1], prof["Y"].prevalence[1]
    case.check("equilibrium prevalence in X", "prevalence F_X(0)", pi_x, dist_x.cdf(0.0), provenance=CLAIMED)
    case.check("equilibrium prevalence in Y", "prevalence F_Y(r(2 phi - 1))", pi_y,
               dist_y.cdf(r * (2 * phi - 1)), provenance=CLAIMED)
    jx, jy = np.array(prof["X"].joint), np.array(prof["Y"].joint)
    rx, ry = _rates(jx), _rates(jy)
    case.check("FPR_Y", "error and predictive value table", ry["FPR"], 1 - phi, tolerance, CLAIMED)
    case.check("FNR_Y", "error and predictive value table", ry["FNR"], 1 - phi, tolerance, CLAIMED)
    case.check("FNR_X (false-negative mass)", "error and predictive value table", rx["FN mass"],
               dist_x.cdf(0.0), tolerance, CLAIMED)
    case.info("FNR_X as a conditional rate", "tabulated entry is a joint mass", rx["FNR"])
    ppv = pi_y * phi / (pi_y * phi + (1 - pi_y) * (1 - phi))
    npv = (1 - pi_y) * phi / ((1 - pi_y) * phi + pi_y * (1 - phi))
    case.check("PPV_Y", "error and predictive value table", ry["PPV"], ppv, tolerance, CLAIMED)
    case.check("NPV_Y", "error and predictive value table", ry["NPV"], npv, tolerance, CLAIMED)
    case.check("NPV_X", "error and predictive value table", rx["NPV"], 1 - dist_x.cdf(0.0), tolerance, CLAIMED)
    case.assert_true("PPV_X undefined (decision 1 unreachable in X)", "error and predictive value table",
                     math.isnan(rx["PPV"]), "undefined", CLAIMED)

    probe = type_probe(sc)
    gap_x = max(abs(value(sc, "X", t) - max(0.0, -t)) for t in probe.points)
    gap_y = max(abs(value(sc, "Y", t) - max(r * (1 - phi), r * phi - t)) for t in probe.points)
    case.check("max |V*_X(t) - max(0, -t)| over probes", "welfare of X", gap_x, 0.0, tolerance, CLAIMED)
    case.check("max |V*_Y(t) - max(r(1-phi), r phi - t)| over probes", "welfare of Y", gap_y, 0.0,
               tolerance, CLAIMED)
    sup, _ = _sup_difference(group_envelope(sc, "X"), group_envelope(sc, "Y"))
    case.assert_true("Y's value weakly exceeds X's at every type", "welfare dominance", sup <= tolerance, sup)
    ef = check_envy_free(sc, probe, tolerance)
    case.assert_true("envy freeness violated", anchor, not ef.passed, ef.residual)

    sim = simulate_arrovian(sc, mc_draws, seed)
    for g, key, exact in (("Y", "PPV", ry["PPV"]), ("Y", "NPV", ry["NPV"])):
        j = sim[g]
        col = 1 if key == "PPV" else 0
        n_col = j[:, col].sum() * mc_draws
        est = j[col, col] / j[:, col].sum()
        se = math.sqrt(exact * (1 - exact) / n_col)
        case.assert_true(f"Monte-Carlo {key}_{g} within 4 standard errors", "simulation cross-check",
                         abs(est - exact) <= 4 * se, {"estimate": est, "exact": exact, "se": se})

    clean = arrovian_scenario(phi, Uniform(0.0, 1.0), dist_y, r)
    jc = np.array(equilibrium_profile(clean)["X"].joint)
    case.check("F_X(0) = 0: X error mass", "zero errors for X", jc[1, 0] + jc[0, 1], 0.0, tolerance, CLAIMED)
    case.check("F_X(0) = 0: NPV_X", "zero errors for X", _rates(jc)["NPV"], 1.0, tolerance, CLAIMED)

    perfect = arrovian_scenario(phi, Uniform(0.0, 1.0), Uniform(-1.0, 0.0), r, algorithm="constant")
    prev = resolve_prevalences(perfect, "equilibrium")
    erb, pp = check_erb(perfect, prev, tolerance), check_pp(perfect, prev, tolerance)
    case.assert_true("group-constant algorithm satisfies ERB and PP when F_X(0)=0, F_Y(0)=1",
                     "perfect classifier", erb.passed and pp.passed,
                     {"ERB": erb.verdict, "PP": pp.verdict}, CLAIMED)
    return case


def asymmetric_ic_threshold(delta0, delta1, phi0, phi1, W, omega) -> float:
    return (phi1 * delta1 + (1 - phi1) * (1 - delta0)) * W - (phi0 * (1 - delta0) + (1 - phi0) * delta1) * omega


def asymmetric_scenario(delta0, delta1, phi0, phi1, W, omega) -> Scenario:
    """Outcome table: (1,1) -> W, (1,0) -> 0, (0,1) -> omega + t, (0,0) -> t."""
    c = np.array([[0.0, omega], [0.0, W]])
    m = np.array([[1.0, 1.0], [0.0, 0.0]])
    prefs = AffineTable.from_arrays({"G": (c, m)})
    group = Group("G", Logistic(0.0, 1.0), AsymmetricBinary(phi0, phi1), Exogenous(0.5))
    return Scenario(2, (group,), prefs, StochasticAlgorithm.from_binary({"G": (delta0, delta1)}))


def verify_asymmetric_ic(r: float = 1.0, delta0: float = 0.8, delta1: float = 0.7, phi0: float = 0.6,
                         phi1: float = 0.9, W: float | None = None, omega: float | None = None,
                         draws: int = 100, seed: int = 42, bracket: float = 1e-6) -> VerificationCase:
    W = r if W is None else W
    omega = r if omega is None else omega
    for name, v in (("delta0", delta0), ("delta1", delta1), ("phi0", phi0), ("phi1", phi1)):
        if not 0.0 <= v <= 1.0:
            raise InputError(f"{name} must lie in [0, 1]")
    case = VerificationCase("asymmetricIC", {"r": r, "delta0": delta0, "delta1": delta1, "phi0": phi0,
                                             "phi1": phi1, "W": W, "omega": omega, "draws": draws, "seed": seed})
    anchor = "incentive condition under asymmetric signals"
    general = asymmetric_ic_threshold(delta0, delta1, phi0, phi1, W, omega)
    engine = threshold(asymmetric_scenario(delta0, delta1, phi0, phi1, W, omega), "G")
    case.check("engine threshold equals the general IC formula", anchor, engine, general, 1e-12)
    product = r * (delta0 + delta1 - 1) * (phi1 + phi0 - 1)
    rr = asymmetric_ic_threshold(delta0, delta1, phi0, phi1, r, r)
    case.check("W = omega = r: general formula equals r(d0+d1-1)(phi1+phi0-1)", anchor, rr, product, 1e-12,
               CLAIMED)
    sep = Scenario(2, (Group("G", Logistic(0.0, 1.0), AsymmetricBinary(phi0, phi1), Exogenous(0.5)),),
                   Separable(r), StochasticAlgorithm.from_binary({"G": (delta0, delta1)}))
    case.check("separable engine threshold equals the product formula", anchor, threshold(sep, "G"), product, 1e-12)
    sym = Scenario(2, (Group("G", Logistic(0.0, 1.0), SymmetricBinary(phi1), Exogenous(0.5)),),
                   Separable(r), StochasticAlgorithm.from_binary({"G": (delta0, delta1)}))
    collapsed = asymmetric_ic_threshold(delta0, delta1, phi1, phi1, r, r)
    case.check("phi0 = phi1: asymmetric formula equals symmetric threshold", "reduces to the symmetric case",
               collapsed, threshold(sym, "G"), 1e-12, CLAIMED)
    case.check("null algorithm: threshold 0 when W = omega",
               "decisions independent of behavior",
               asymmetric_ic_threshold(0.3, 0.7, phi0, phi1, r, r), 0.0, 1e-12)

    rng = np.random.default_rng(seed)
    matches = 0
    eq_matches = 0
    for i in range(draws):
        d0, d1, p0, p1 = (float(x) for x in rng.uniform(0.0, 1.0, 4))
        w_, o_ = (float(x) for x in rng.uniform(0.5, 2.0, 2))
        t_star = asymmetric_ic_threshold(d0, d1, p0, p1, w_, o_)
        sc = asymmetric_scenario(d0, d1, p0, p1, w_, o_)
        below = best_response(sc, "G", t_star - bracket)
        above = best_response(sc, "G", t_star + bracket)
        if below.optimal == (1,) and above.optimal == (0,):
            matches += 1
        elif len(case.witnesses) < 5:
            case.witness(f"crossover mismatch, draw {i}", sc, threshold=t_star)
        s_sym = asymmetric_ic_threshold(d0, d1, p0, p0, w_, w_)
        if abs(s_sym - w_ * (d0 + d1 - 1) * (2 * p0 - 1)) <= 1e-12:
            eq_matches += 1
    case.check("random draws where best responses switch across the IC threshold", anchor, matches, draws, 0)
    case.check("random draws where the equal-accuracy collapse holds", "reduces to the symmetric case",
               eq_matches, draws, 0)
    return case


def random_reviewer_scenario(rng: np.random.Generator, k: int, pp: bool) -> tuple[Scenario, ReviewerPreferences]:
    if k == 2:
        phi = {g: SymmetricBinary(float(rng.uniform(0.55, 0.99))) for g in ("X", "Y")}
        D = {g: _random_stochastic(rng, 2, diag=1.0) for g in ("X", "Y")}
        prev = {g: float(rng.uniform(0.05, 0.95)) for g in ("X", "Y")}
    else:
        phi = {g: General(_random_stochastic(rng, k, diag=2.0)) for g in ("X", "Y")}
        D = {g: _random_stochastic(rng, k, diag=1.0) for g in ("X", "Y")}
        prev = {g: tuple(float(x) for x in rng.dirichlet(np.ones(k))) for g in ("X", "Y")}
    if pp:
        phi["Y"], D["Y"], prev["Y"] = phi["X"], D["X"], prev["X"]
    groups = tuple(Group(g, Logistic(0.0, 1.0), phi[g], Exogenous(prev[g])) for g in ("X", "Y"))
    sc = Scenario(k, groups, NormalizedError({"X": 0.0, "Y": 0.0}, {"X": 0.0, "Y": 0.0}) if k == 2
                  else AffineTable.from_arrays({g: (np.zeros((k, k)), np.zeros((k, k))) for g in ("X", "Y")}),
                  StochasticAlgorithm(D))
    table = rng.uniform(-1.0, 1.0, (k, k, k))
    return sc, ReviewerPreferences.group_blind(table, ("X", "Y"))


def verify_appendix_f(trials: int = 500, ternary: int = 200, seed: int = 42,
                      tolerance: float = 1e-9) -> VerificationCase:
    case = VerificationCase("appendixF", {"trials": trials, "ternary": ternary, "seed": seed,
                                          "tolerance": tolerance})
    anchor = "reviewer prejudice freeness, equal consequences and predictive parity"
    rng = np.random.default_rng(seed)
    counts = {"PF<->EC": 0, "PF<->PP": 0, "EC<->PP": 0, "all": 0}
    for i in range(trials):
        sc, rev = random_reviewer_scenario(rng, 2, pp=(i % 4 == 0))
        rep = verify_reviewer_equivalence(sc, rev, resolve_prevalences(sc), tolerance)
        for key in ("PF<->EC", "PF<->PP", "EC<->PP"):
            counts[key] += rep.agreements[key]
        counts["all"] += rep.consistent
        if not rep.consistent and len(case.witnesses) < 3:
            case.witness(f"binary disagreement, trial {i}", sc, reviewer=rev.to_dict(), verdicts=rep.to_dict())
    for key in ("PF<->EC", "PF<->PP", "EC<->PP"):
        case.info(f"binary trials where {key} agree", anchor, counts[key])
    case.check("binary trials where PF, EC and PP all agree", anchor, counts["all"], trials, 0, CLAIMED)
    agree3 = 0
    for i in range(ternary):
        sc, rev = random_reviewer_scenario(rng, 3, pp=(i % 4 == 0))
        rep = verify_reviewer_equivalence(sc, rev, resolve_prevalences(sc), tolerance)
        agree3 += rep.agreements["PF<->EC"]
    case.check("k = 3 trials where PF and EC agree", anchor, agree3, ternary, 0, CLAIMED)

    sc, rev = reviewer_counterexample()
    rep = verify_reviewer_equivalence(sc, rev, resolve_prevalences(sc), tolerance)
    case.info("matching reviewer, always-1 algorithm, prevalences 0.6 / 0.7",
              "equal consequences compares argmax sets only", rep.to_dict())
    case.witness("EC without PF or PP", sc, reviewer=rev.to_dict())
    return case


def reviewer_counterexample() -> tuple[Scenario, ReviewerPreferences]:
    """Both posteriors favour behavior 1, so the matching reviewer picks 1 in both groups."""
    groups = tuple(Group(g, Logistic(0.0, 1.0), SymmetricBinary(0.8), Exogenous(pi))
                   for g, pi in (("X", 0.6), ("Y", 0.7)))
    sc = Scenario(2, groups, NormalizedError({"X": 0.0, "Y": 0.0}, {"X": 0.0, "Y": 0.0}),
                  StochasticAlgorithm.from_binary({"X": (0.0, 1.0), "Y": (0.0, 1.0)}))
    return sc, ReviewerPreferences.matching(2, ("X", "Y"))


CASES: dict[str, Callable[..., VerificationCase]] = {
    "theorem1": verify_theorem_1,
    "prop2": verify_prop_2,
    "theorem2": verify_theorem_2,
    "appendixE": verify_appendix_e,
    "arrovian": verify_arrovian,
    "asymmetricIC": verify_asymmetric_ic,
    "appendixF": verify_appendix_f,
}
ALL_CASES = ("theorem1", "prop2", "theorem2", "appendixE", "arrovian", "asymmetricIC")
