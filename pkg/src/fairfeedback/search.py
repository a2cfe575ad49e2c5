"""Lattice scans over binary algorithms and projection onto error rate balance.

A scan fixes a binary template (signals, preferences, prevalences) and varies
every group's ``(delta0, delta1)`` over an integer lattice of step ``h``.
Cells are evaluated in vectorized batches; refinement halves the step around
passing cells.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import equilibrium_prevalence
from .model import ANALYTIC_TOL, Endogenous, Exogenous, Scenario, StochasticAlgorithm

PREDICATES = ("ERB", "PP", "AB", "EO", "EF", "PF")
_SLOPE_TOL = 1e-12
_REACH = 1e-12


class BudgetExceeded(ValueError):
    def __init__(self, estimate: int, budget: int):
        super().__init__(f"scan needs about {estimate} evaluations, budget is {budget}")
        self.estimate = estimate
        self.budget = budget


@dataclass(frozen=True)
class ScanSpec:
    resolution: float = 0.05
    predicates: tuple[str, ...] = ("ERB", "PP")
    prevalence: str = "exogenous"  # or "endogenous"
    tolerance: float = 1e-6
    depth: int = 2
    budget: int = 10**7

    def __post_init__(self):
        steps = 1.0 / self.resolution
        if not 0 < self.resolution <= 0.5 or abs(steps - round(steps)) > 1e-9:
            raise ValueError("resolution must lie in (0, 0.5] and divide 1 evenly")
        if not 0 <= self.depth <= 6:
            raise ValueError("refinement depth must be between 0 and 6")
        unknown = set(self.predicates) - set(PREDICATES)
        if unknown or not self.predicates:
            raise ValueError(f"predicates must be a nonempty subset of {PREDICATES}")
        if self.prevalence not in ("exogenous", "endogenous"):
            raise ValueError("prevalence must be 'exogenous' or 'endogenous'")

    @property
    def steps(self) -> int:
        return int(round(1.0 / self.resolution))

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "predicates": list(self.predicates),
            "prevalence": self.prevalence,
            "tolerance": self.tolerance,
            "depth": self.depth,
            "budget": self.budget,
        }


@dataclass(frozen=True)
class ScanResult:
    spec: ScanSpec
    groups: tuple[str, ...]
    rows: tuple[dict, ...]  # passing cells
    evaluated: int
    levels: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def passes(self) -> int:
        return len(self.rows)

    @property
    def nondegenerate_passes(self) -> int:
        return sum(1 for r in self.rows if not r["degenerate"])

    def summary(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "groups": list(self.groups),
            "evaluated": self.evaluated,
            "passes": self.passes,
            "nondegenerate_passes": self.nondegenerate_passes,
            "levels": list(self.levels),
        }

    def fieldnames(self) -> list[str]:
        cols = ["level"]
        for g in self.groups:
            cols += [f"{g}_delta0", f"{g}_delta1"]
        cols += [f"residual_{p}" for p in self.spec.predicates]
        return cols + ["degenerate"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.fieldnames(), lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def pass_set(self, level: int = 0) -> set[tuple[float, ...]]:
        keys = [k for k in self.fieldnames() if "_delta" in k]
        return {tuple(r[k] for k in keys) for r in self.rows if r["level"] == level}


# ---------------------------------------------------------------------------
# Vectorized envelope helpers. Lines are arrays of shape (M, k).
# ---------------------------------------------------------------------------


def _crossings(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    cols = []
    k = A.shape[1]
    for i in range(k):
        for j in range(i + 1, k):
            db = B[:, i] - B[:, j]
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(db != 0, (A[:, j] - A[:, i]) / np.where(db != 0, db, 1.0), np.nan)
            cols.append(t)
    return np.stack(cols, axis=1) if cols else np.zeros((A.shape[0], 0))


def _lines_at(A, B, T):
    return A[:, None, :] + B[:, None, :] * T[:, :, None]


def _env(A, B, T):
    return _lines_at(A, B, T).max(axis=-1)


def _regret(A, B, T):
    vals = _lines_at(A, B, T)
    return vals.max(axis=-1, keepdims=True) - vals


def _optimal_mask(A, B, T, tie):
    vals = _lines_at(A, B, T)
    return vals >= vals.max(axis=-1, keepdims=True) - tie


def sup_gap(UA, UB, LA, LB) -> np.ndarray:
    """Row-wise ``sup_t [max(U) - max(L)]`` for affine line families."""
    T = np.concatenate([_crossings(UA, UB), _crossings(LA, LB), np.zeros((UA.shape[0], 1))], axis=1)
    T = np.where(np.isfinite(T), T, 0.0)
    best = (_env(UA, UB, T) - _env(LA, LB, T)).max(axis=1)
    grows_right = UB.max(axis=1) - LB.max(axis=1) > _SLOPE_TOL
    grows_left = UB.min(axis=1) - LB.min(axis=1) < -_SLOPE_TOL
    return np.where(grows_right | grows_left, np.inf, best)


def eo_gap(GA, GB, HA, HB, tie: float) -> np.ndarray:
    """Row-wise set-equality gap of best responses over all types (see the welfare module)."""
    M = GA.shape[0]
    T = np.concatenate([_crossings(GA, GB), _crossings(HA, HB)], axis=1)
    T = np.sort(np.where(np.isfinite(T), T, 0.0), axis=1)
    if T.shape[1] == 0:
        T = np.zeros((M, 1))
    lo = np.concatenate([T[:, :1] - 1.0, T], axis=1)  # finite stand-ins for -inf
    hi = np.concatenate([T, T[:, -1:] + 1.0], axis=1)
    probe = 0.5 * (lo + hi)
    probe[:, 0] = T[:, 0] - 1.0
    probe[:, -1] = T[:, -1] + 1.0
    mg = _optimal_mask(GA, GB, probe, tie)
    mh = _optimal_mask(HA, HB, probe, tie)
    only_g, only_h = mg & ~mh, mh & ~mg
    out = np.zeros(M)
    ends = [(lo, 0), (hi, -1)]
    for end, tail_index in ends:
        rh, rg = _regret(HA, HB, end), _regret(GA, GB, end)
        gap = np.maximum(np.where(only_g, rh, 0.0), np.where(only_h, rg, 0.0))
        # the outermost cells are unbounded: regret growing outward means an infinite gap
        out_probe = probe.copy()
        out_probe[:, tail_index] += -1.0 if tail_index == 0 else 1.0
        grow_h = _regret(HA, HB, out_probe) - _regret(HA, HB, probe)
        grow_g = _regret(GA, GB, out_probe) - _regret(GA, GB, probe)
        tail = np.zeros_like(gap, dtype=bool)
        tail[:, tail_index, :] = True
        growing = tail & ((only_g & (grow_h > _SLOPE_TOL)) | (only_h & (grow_g > _SLOPE_TOL)))
        gap = np.where(growing, np.inf, gap)
        out = np.maximum(out, gap.max(axis=(1, 2)))
    # sets at the breakpoints themselves
    mg, mh = _optimal_mask(GA, GB, T, tie), _optimal_mask(HA, HB, T, tie)
    rh, rg = _regret(HA, HB, T), _regret(GA, GB, T)
    point = np.maximum(np.where(mg & ~mh, rh, 0.0), np.where(mh & ~mg, rg, 0.0)).max(axis=(1, 2))
    return np.maximum(out, point)


# ---------------------------------------------------------------------------
# Cell evaluation
# ---------------------------------------------------------------------------


def _decision_matrices(deltas: np.ndarray) -> np.ndarray:
    """(M, 2) array of (delta0, delta1) -> (M, 2, 2) decision kernels."""
    d0, d1 = deltas[:, 0], deltas[:, 1]
    return np.stack([np.stack([d0, 1 - d0], axis=1), np.stack([1 - d1, d1], axis=1)], axis=1)


class _Evaluator:
    def __init__(self, template: Scenario, spec: ScanSpec):
        if template.k != 2:
            raise ValueError("scans require a binary template")
        self.t = template
        self.spec = spec
        self.labels = template.labels
        self._prev_cache: dict = {}

    def _prevalence(self, g: str, deltas: np.ndarray) -> np.ndarray:
        group = self.t.group(g)
        if self.spec.prevalence == "exogenous" and isinstance(group.prevalence, Exogenous):
            return np.tile(group.prevalence.distribution(2), (len(deltas), 1))
        out = np.empty((len(deltas), 2))
        for i, (d0, d1) in enumerate(deltas):
            key = (g, float(d0), float(d1))
            if key not in self._prev_cache:
                sc = self.t.with_algorithm(StochasticAlgorithm.from_binary({**{h: (0.5, 0.5) for h in self.labels}, g: (d0, d1)}))
                sc = sc.with_prevalences({g: Endogenous()})
                self._prev_cache[key] = equilibrium_prevalence(sc, g)
            out[i] = self._prev_cache[key]
        return out

    def evaluate(self, cells: np.ndarray) -> tuple[dict[str, np.ndarray], np.ndarray]:
        """``cells`` has shape (M, G, 2). Returns per-predicate residuals and degeneracy flags."""
        tol = self.spec.tolerance
        tie = self.t.tie_tolerance
        C, P, H, reach, lines, weights = {}, {}, {}, {}, {}, {}
        degenerate = np.zeros(len(cells), dtype=bool)
        for gi, g in enumerate(self.labels):
            D = _decision_matrices(cells[:, gi, :])
            C[g] = self.t.signal_matrix(g)[None, :, :] @ D
            P[g] = self._prevalence(g, cells[:, gi, :])
            joint = P[g][:, :, None] * C[g]
            pd = joint.sum(axis=1)
            reach[g] = pd >= _REACH
            with np.errstate(divide="ignore", invalid="ignore"):
                H[g] = np.where(reach[g][:, None, :], joint / np.where(pd > 0, pd, 1.0)[:, None, :], 0.0)
            weights[g] = self.t.weight_table(g)
            degenerate |= (pd < 10 * tol).any(axis=1)
            degenerate |= np.abs(cells[:, gi, 0] + cells[:, gi, 1] - 1.0) <= 1e-12
        want = set(self.spec.predicates)
        if want & {"EO", "EF"}:
            coef = {g: self.t.coefficients(g) for g in self.labels}
            for g in self.labels:
                c, m = coef[g]
                for h in self.labels:
                    lines[(g, h)] = ((C[h] * c).sum(-1), (C[h] * m).sum(-1))
        res = {p: np.zeros(len(cells)) for p in self.spec.predicates}
        for g, h in itertools.combinations(self.labels, 2):
            both_beta = (P[g] > 0) & (P[h] > 0)
            both_d = reach[g] & reach[h]
            if "ERB" in want:
                gap = np.abs(C[g] - C[h]).max(axis=2)
                res["ERB"] = np.maximum(res["ERB"], np.where(both_beta, gap, 0.0).max(axis=1))
            if "AB" in want:
                gap = np.abs(np.diagonal(C[g], axis1=1, axis2=2) - np.diagonal(C[h], axis1=1, axis2=2))
                res["AB"] = np.maximum(res["AB"], np.where(both_beta, gap, 0.0).max(axis=1))
            if "PP" in want:
                gap = np.abs(H[g] - H[h]).max(axis=1)
                res["PP"] = np.maximum(res["PP"], np.where(both_d, gap, 0.0).max(axis=1))
            if "PF" in want:
                vg = np.einsum("mbd,db->md", H[g], weights[g])
                vh = np.einsum("mbd,db->md", H[h], weights[h])
                res["PF"] = np.maximum(res["PF"], np.where(both_d, np.abs(vg - vh), 0.0).max(axis=1))
            if "EO" in want:
                res["EO"] = np.maximum(res["EO"], eo_gap(*lines[(g, g)], *lines[(h, h)], tie))
            if "EF" in want:
                for a, b in ((g, h), (h, g)):
                    gain = np.maximum(sup_gap(*lines[(a, b)], *lines[(a, a)]), 0.0)
                    res["EF"] = np.maximum(res["EF"], gain)
        return res, degenerate


def _lattice(n: int, dims: int) -> np.ndarray:
    axes = [np.arange(n + 1)] * dims
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dims)


def scan(template: Scenario, spec: ScanSpec) -> ScanResult:
    ev = _Evaluator(template, spec)
    G = len(ev.labels)
    dims = 2 * G
    n = spec.steps
    first = (n + 1) ** dims
    if first > spec.budget:
        raise BudgetExceeded(first, spec.budget)
    coords = _lattice(n, dims)
    evaluated = 0
    rows: list[dict] = []
    seen: set[tuple] = set()
    levels = []
    for level in range(spec.depth + 1):
        denom = n * 2**level
        if len(coords) == 0:
            levels.append({"level": level, "step": 1.0 / denom, "evaluated": 0, "passes": 0})
            continue
        evaluated += len(coords)
        if evaluated > spec.budget:
            raise BudgetExceeded(evaluated, spec.budget)
        values = coords / denom
        res, degenerate = ev.evaluate(values.reshape(-1, G, 2))
        ok = np.ones(len(coords), dtype=bool)
        for p in spec.predicates:
            ok &= res[p] <= spec.tolerance
        passing = coords[ok]
        levels.append({"level": level, "step": 1.0 / denom, "evaluated": int(len(coords)), "passes": int(ok.sum())})
        for idx in np.flatnonzero(ok):
            key = tuple(float(x) for x in values[idx])
            if key in seen:
                continue
            seen.add(key)
            row: dict = {"level": level}
            for gi, g in enumerate(ev.labels):
                row[f"{g}_delta0"] = key[2 * gi]
                row[f"{g}_delta1"] = key[2 * gi + 1]
            for p in spec.predicates:
                row[f"residual_{p}"] = float(res[p][idx])
            row["degenerate"] = bool(degenerate[idx])
            rows.append(row)
        if level == spec.depth:
            break
        offsets = _lattice(2, dims) - 1
        children = (2 * passing)[:, None, :] + offsets[None, :, :]
        children = children.reshape(-1, dims)
        children = children[((children >= 0) & (children <= 2 * denom)).all(axis=1)]
        coords = np.unique(children, axis=0) if len(children) else children
    return ScanResult(spec, ev.labels, tuple(rows), evaluated, tuple(levels))


def endogenous_scan(template: Scenario, spec: ScanSpec) -> ScanResult:
    """Scan with every group's prevalence taken from its equilibrium at each cell."""
    if spec.prevalence != "endogenous":
        spec = ScanSpec(spec.resolution, spec.predicates, "endogenous", spec.tolerance, spec.depth, spec.budget)
    return scan(template, spec)


# ---------------------------------------------------------------------------
# Projection onto error rate balance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Infeasible:
    reason: str
    solution: tuple[float, ...] | None = None


def project_to_erb(scenario: Scenario, group: str, tolerance: float = ANALYTIC_TOL,
                   reference: str | None = None):
    """Decision kernel for ``group`` that reproduces ``reference``'s behavior-conditional rates."""
    if scenario.k != 2:
        raise ValueError("projection requires a binary scenario")
    reference = reference or next(g for g in scenario.labels if g != group)
    target = scenario.conditional(reference)
    phi = scenario.signal_matrix(group)
    D, *_ = np.linalg.lstsq(phi, target, rcond=None)
    if np.abs(phi @ D - target).max() > tolerance:
        return Infeasible("signal model cannot reproduce the reference rates")
    if (D < -tolerance).any() or (D > 1 + tolerance).any():
        return Infeasible("solution leaves the unit square", (float(D[0, 0]), float(D[1, 1])))
    D = np.clip(D, 0.0, 1.0)
    d0, d1 = float(D[0, 0]), float(D[1, 1])
    matrices = dict(scenario.algorithm.matrices)
    matrices[group] = ((d0, 1.0 - d0), (1.0 - d1, d1))
    return StochasticAlgorithm(matrices)
