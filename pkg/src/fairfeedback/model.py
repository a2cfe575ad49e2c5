"""Domain types for classification problems with endogenous behavior.

Everything here is an immutable value. Matrices are stored as nested tuples
and exposed as fresh numpy arrays so callers can never mutate shared state.
Behaviors, signals and decisions are integer labels ``0..k-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence, Union

import numpy as np
from scipy import special

STRUCTURAL_TOL = 1e-12
ANALYTIC_TOL = 1e-9


class InputError(ValueError):
    """Raised when constructor arguments fall outside their domain."""


Matrix = tuple[tuple[float, ...], ...]


def _as_matrix(rows: Sequence[Sequence[float]]) -> Matrix:
    return tuple(tuple(float(x) for x in row) for row in rows)


# ---------------------------------------------------------------------------
# Type distributions
# ---------------------------------------------------------------------------


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float
    kind = "uniform"
    full_support = False

    def cdf(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.clip((t_arr - self.a) / (self.b - self.a), 0.0, 1.0)
        return _scalar_or_array(t, out)

    def quantile(self, p):
        out = self.a + np.asarray(p, dtype=float) * (self.b - self.a)
        return _scalar_or_array(p, out)

    def partial_mean(self, lo: float, hi: float) -> float:
        """Integral of ``t dF(t)`` over ``[lo, hi]``."""
        lo, hi = max(lo, self.a), min(hi, self.b)
        if hi <= lo:
            return 0.0
        return (hi * hi - lo * lo) / (2.0 * (self.b - self.a))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Logistic:
    mu: float
    scale: float
    kind = "logistic"
    full_support = True

    def cdf(self, t):
        out = special.expit((np.asarray(t, dtype=float) - self.mu) / self.scale)
        return _scalar_or_array(t, out)

    def quantile(self, p):
        out = self.mu + self.scale * special.logit(np.asarray(p, dtype=float))
        return _scalar_or_array(p, out)

    def _antiderivative(self, t: float) -> float:
        # d/dt [t F(t) - s * softplus((t - mu)/s)] = t f(t)
        if t == -math.inf:
            return 0.0
        if t == math.inf:
            return self.mu
        z = (t - self.mu) / self.scale
        return t * float(special.expit(z)) - self.scale * float(np.logaddexp(0.0, z))

    def partial_mean(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        return self._antiderivative(hi) - self._antiderivative(lo)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "mu": self.mu, "scale": self.scale}


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float
    kind = "normal"
    full_support = True

    def cdf(self, t):
        out = special.ndtr((np.asarray(t, dtype=float) - self.mu) / self.sigma)
        return _scalar_or_array(t, out)

    def quantile(self, p):
        out = self.mu + self.sigma * special.ndtri(np.asarray(p, dtype=float))
        return _scalar_or_array(p, out)

    def partial_mean(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0

        def pdf_z(x: float) -> float:
            if math.isinf(x):
                return 0.0
            z = (x - self.mu) / self.sigma
            return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)

        mass = self.cdf(hi) - self.cdf(lo)
        return self.mu * mass - self.sigma * (pdf_z(hi) - pdf_z(lo))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "mu": self.mu, "sigma": self.sigma}


TypeDistribution = Union[Uniform, Logistic, Normal]


# ---------------------------------------------------------------------------
# Signal models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricBinary:
    phi: float
    kind = "symmetric_binary"
    k = 2

    def matrix(self) -> np.ndarray:
        p = self.phi
        return np.array([[p, 1.0 - p], [1.0 - p, p]])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "phi": self.phi}


@dataclass(frozen=True)
class AsymmetricBinary:
    phi0: float
    phi1: float
    kind = "asymmetric_binary"
    k = 2

    def matrix(self) -> np.ndarray:
        return np.array([[self.phi0, 1.0 - self.phi0], [1.0 - self.phi1, self.phi1]])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "phi0": self.phi0, "phi1": self.phi1}


@dataclass(frozen=True)
class General:
    """Row-stochastic matrix ``Phi[beta][s] = Pr[s | beta]``."""

    rows: Matrix
    kind = "general"

    def __post_init__(self):
        object.__setattr__(self, "rows", _as_matrix(self.rows))

    @property
    def k(self) -> int:
        return len(self.rows)

    def matrix(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "matrix": [list(r) for r in self.rows]}


SignalModel = Union[SymmetricBinary, AsymmetricBinary, General]


def symmetric_general(k: int, phi: float) -> General:
    """k-ary signal that is correct w.p. ``phi`` and otherwise uniform over the rest."""
    off = (1.0 - phi) / (k - 1)
    return General(tuple(tuple(phi if i == j else off for j in range(k)) for i in range(k)))


# ---------------------------------------------------------------------------
# Algorithms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StochasticAlgorithm:
    """Per-group decision kernel ``D_g[s][d] = Pr[d | s, g]``."""

    matrices: Mapping[str, Matrix]

    def __post_init__(self):
        object.__setattr__(
            self, "matrices", {g: _as_matrix(m) for g, m in self.matrices.items()}
        )

    @classmethod
    def from_binary(cls, deltas: Mapping[str, tuple[float, float]]) -> StochasticAlgorithm:
        """Build from ``(delta0, delta1)`` = probabilities of matching each signal."""
        return cls(
            {g: ((d0, 1.0 - d0), (1.0 - d1, d1)) for g, (d0, d1) in deltas.items()}
        )

    def matrix(self, group: str) -> np.ndarray:
        return np.array(self.matrices[group], dtype=float)

    def binary(self, group: str) -> tuple[float, float]:
        m = self.matrices[group]
        if len(m) != 2:
            raise InputError("binary accessor requires k = 2")
        return m[0][0], m[1][1]

    def to_dict(self) -> dict:
        return {g: [list(r) for r in m] for g, m in self.matrices.items()}


# ---------------------------------------------------------------------------
# Preferences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizedError:
    """Payoff ``lam`` for a false negative, ``gamma`` for a false positive, else 0."""

    lam: Mapping[str, float]
    gamma: Mapping[str, float]
    kind = "normalized_error"

    def coefficients(self, group: str, k: int) -> tuple[np.ndarray, np.ndarray]:
        c = np.zeros((2, 2))
        c[1, 0] = self.lam[group]
        c[0, 1] = self.gamma[group]
        return c, np.zeros((2, 2))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lambda": dict(self.lam), "gamma": dict(self.gamma)}


@dataclass(frozen=True)
class Separable:
    """``u(beta, d, t) = r * d - t * beta``."""

    r: float
    kind = "separable"

    def coefficients(self, group: str, k: int) -> tuple[np.ndarray, np.ndarray]:
        labels = np.arange(k, dtype=float)
        c = np.tile(self.r * labels, (k, 1))
        m = -np.tile(labels[:, None], (1, k))
        return c, m

    def to_dict(self) -> dict:
        return {"kind": self.kind, "r": self.r}


@dataclass(frozen=True)
class AffineTable:
    """``u(beta, d, t, g) = c + m * t`` keyed by ``(beta, d, g)``."""

    entries: Mapping[tuple[int, int, str], tuple[float, float]]
    kind = "affine_table"

    def coefficients(self, group: str, k: int) -> tuple[np.ndarray, np.ndarray]:
        c = np.zeros((k, k))
        m = np.zeros((k, k))
        for b in range(k):
            for d in range(k):
                c[b, d], m[b, d] = self.entries[(b, d, group)]
        return c, m

    @classmethod
    def from_arrays(
        cls, tables: Mapping[str, tuple[Sequence[Sequence[float]], Sequence[Sequence[float]]]]
    ) -> AffineTable:
        """``tables[g] = (c, m)`` with ``c[beta][d]`` and ``m[beta][d]``."""
        entries = {}
        for g, (c, m) in tables.items():
            for b, row in enumerate(c):
                for d, value in enumerate(row):
                    entries[(b, d, g)] = (float(value), float(m[b][d]))
        return cls(entries)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "entries": [
                {"behavior": b, "decision": d, "group": g, "c": c, "m": m}
                for (b, d, g), (c, m) in sorted(self.entries.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1]))
            ],
        }


PreferenceModel = Union[NormalizedError, Separable, AffineTable]


# ---------------------------------------------------------------------------
# Reviewer payoffs (consumed by the reviewer module)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReviewerPreferences:
    """Reviewer payoff ``u_R(x, beta, d, g)``; consequences coincide with decisions."""

    payoffs: Mapping[str, tuple]  # g -> nested [x][beta][d]

    def __post_init__(self):
        object.__setattr__(
            self,
            "payoffs",
            {g: tuple(_as_matrix(layer) for layer in table) for g, table in self.payoffs.items()},
        )

    def table(self, group: str) -> np.ndarray:
        return np.array(self.payoffs[group], dtype=float)

    @classmethod
    def group_blind(cls, table, groups: Sequence[str]) -> ReviewerPreferences:
        return cls({g: table for g in groups})

    @classmethod
    def matching(cls, k: int, groups: Sequence[str]) -> ReviewerPreferences:
        """Reward 1 when the consequence equals the behavior."""
        t = [[[1.0 if x == b else 0.0 for _ in range(k)] for b in range(k)] for x in range(k)]
        return cls.group_blind(t, groups)

    def to_dict(self) -> dict:
        return {g: [[list(r) for r in layer] for layer in t] for g, t in self.payoffs.items()}


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exogenous:
    pi: Union[float, tuple[float, ...]]
    mode = "exogenous"

    def distribution(self, k: int) -> np.ndarray:
        if isinstance(self.pi, tuple):
            return np.array(self.pi, dtype=float)
        if k != 2:
            raise InputError("scalar prevalence requires k = 2")
        return np.array([1.0 - self.pi, self.pi])

    def to_dict(self) -> dict:
        pi = list(self.pi) if isinstance(self.pi, tuple) else self.pi
        return {"mode": self.mode, "pi": pi}


@dataclass(frozen=True)
class Endogenous:
    mode = "endogenous"

    def to_dict(self) -> dict:
        return {"mode": self.mode}


Prevalence = Union[Exogenous, Endogenous]


@dataclass(frozen=True)
class Group:
    id: str
    distribution: TypeDistribution
    signal: SignalModel
    prevalence: Prevalence = field(default_factory=Endogenous)


@dataclass(frozen=True)
class Scenario:
    k: int
    groups: tuple[Group, ...]
    preferences: PreferenceModel
    algorithm: StochasticAlgorithm
    ex_post_weights: Mapping[str, Union[float, Matrix]] = field(default_factory=dict)
    reviewer: ReviewerPreferences | None = None
    tie_tolerance: float = ANALYTIC_TOL

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(g.id for g in self.groups)

    def group(self, label: str) -> Group:
        for g in self.groups:
            if g.id == label:
                return g
        raise KeyError(label)

    def signal_matrix(self, label: str) -> np.ndarray:
        return self.group(label).signal.matrix()

    def decision_matrix(self, label: str) -> np.ndarray:
        return self.algorithm.matrix(label)

    def conditional(self, label: str) -> np.ndarray:
        """``Pr[d | beta, g]`` with signals marginalized out."""
        return self.signal_matrix(label) @ self.decision_matrix(label)

    def coefficients(self, label: str) -> tuple[np.ndarray, np.ndarray]:
        return self.preferences.coefficients(label, self.k)

    def weight_table(self, label: str) -> np.ndarray:
        """Ex-post weights ``w_g(d, beta)``; a scalar ``w`` means ``w * 1[beta = 1]``."""
        w = self.ex_post_weights.get(label, 1.0)
        if isinstance(w, (int, float)):
            table = np.zeros((self.k, self.k))
            table[:, 1] = float(w)
            return table
        return np.array(w, dtype=float)

    def is_binary(self) -> bool:
        return self.k == 2

    def with_algorithm(self, algorithm: StochasticAlgorithm) -> Scenario:
        return replace(self, algorithm=algorithm)

    def with_prevalences(self, prevalences: Mapping[str, Prevalence]) -> Scenario:
        groups = tuple(replace(g, prevalence=prevalences.get(g.id, g.prevalence)) for g in self.groups)
        return replace(self, groups=groups)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    path: str
    message: str


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def messages(self) -> list[str]:
        return [f"{v.path}: {v.message}" for v in self.violations]


def _check_stochastic(m: np.ndarray, k: int, path: str, what: str) -> list[Violation]:
    out = []
    if m.shape != (k, k):
        return [Violation(path, f"{what} must be {k}x{k}, got {m.shape}")]
    if np.any(m < 0.0) or np.any(m > 1.0):
        out.append(Violation(path, f"{what} entries outside [0, 1]"))
    for i, s in enumerate(m.sum(axis=1)):
        if abs(s - 1.0) > STRUCTURAL_TOL:
            out.append(Violation(f"{path}[{i}]", f"{what} row not stochastic (sums to {s:.12g})"))
    return out


def validate(scenario: Scenario) -> ValidationResult:
    """Collect every invariant violation; never raises."""
    v: list[Violation] = []
    k = scenario.k
    if k < 2:
        v.append(Violation("k", "k must be at least 2"))
        return ValidationResult(tuple(v))
    labels = scenario.labels
    if len(labels) == 0:
        v.append(Violation("groups", "at least one group required"))
    if len(set(labels)) != len(labels):
        v.append(Violation("groups", "group labels must be unique"))

    for i, g in enumerate(scenario.groups):
        base = f"groups[{i}]"
        sig = g.signal
        if isinstance(sig, SymmetricBinary):
            if k != 2:
                v.append(Violation(f"{base}.signal", "symmetric binary signal requires k = 2"))
            if sig.phi < 0.5:
                v.append(Violation(f"{base}.signal.phi", "φ below 1/2"))
            if sig.phi > 1.0:
                v.append(Violation(f"{base}.signal.phi", "φ above 1"))
        elif isinstance(sig, AsymmetricBinary):
            if k != 2:
                v.append(Violation(f"{base}.signal", "asymmetric binary signal requires k = 2"))
            for name in ("phi0", "phi1"):
                if not 0.0 <= getattr(sig, name) <= 1.0:
                    v.append(Violation(f"{base}.signal.{name}", f"{name} outside [0, 1]"))
        else:
            v.extend(_check_stochastic(sig.matrix(), k, f"{base}.signal", "signal"))

        dist = g.distribution
        if isinstance(dist, Uniform) and not dist.b > dist.a:
            v.append(Violation(f"{base}.distribution", "uniform requires a < b"))
        if isinstance(dist, Logistic) and not dist.scale > 0:
            v.append(Violation(f"{base}.distribution", "logistic scale must be positive"))
        if isinstance(dist, Normal) and not dist.sigma > 0:
            v.append(Violation(f"{base}.distribution", "normal sigma must be positive"))

        prev = g.prevalence
        if isinstance(prev, Exogenous):
            if isinstance(prev.pi, tuple):
                p = np.array(prev.pi)
                if p.shape != (k,) or np.any(p < 0) or np.any(p > 1) or abs(p.sum() - 1.0) > STRUCTURAL_TOL:
                    v.append(Violation(f"{base}.prevalence", "prevalence must be a distribution over behaviors"))
            else:
                if k != 2:
                    v.append(Violation(f"{base}.prevalence", "scalar prevalence requires k = 2"))
                if not 0.0 <= prev.pi <= 1.0:
                    v.append(Violation(f"{base}.prevalence.pi", "π outside [0, 1]"))
        elif isinstance(scenario.preferences, NormalizedError):
            v.append(
                Violation(f"{base}.prevalence", "endogenous prevalence needs type-dependent preferences")
            )

        if g.id not in scenario.algorithm.matrices:
            v.append(Violation(f"algorithm.{g.id}", "missing decision matrix"))
        else:
            v.extend(
                _check_stochastic(scenario.algorithm.matrix(g.id), k, f"algorithm.{g.id}", "algorithm")
            )

        w = scenario.ex_post_weights.get(g.id)
        if w is not None:
            if isinstance(w, (int, float)):
                if not w > 0:
                    v.append(Violation(f"ex_post_weights.{g.id}", "weight must be positive"))
            elif np.array(w).shape != (k, k):
                v.append(Violation(f"ex_post_weights.{g.id}", f"weight table must be {k}x{k}"))

    extra = set(scenario.algorithm.matrices) - set(labels)
    for g in sorted(extra):
        v.append(Violation(f"algorithm.{g}", "decision matrix for unknown group"))

    prefs = scenario.preferences
    if isinstance(prefs, NormalizedError):
        if k != 2:
            v.append(Violation("preferences", "normalized error preferences require k = 2"))
        for g in labels:
            if g not in prefs.lam or g not in prefs.gamma:
                v.append(Violation(f"preferences.{g}", "missing λ/γ for group"))
    elif isinstance(prefs, AffineTable):
        for g in labels:
            for b in range(k):
                for d in range(k):
                    if (b, d, g) not in prefs.entries:
                        v.append(Violation(f"preferences.entries", f"missing cell (β={b}, d={d}, g={g})"))

    if scenario.reviewer is not None:
        for g in labels:
            if g not in scenario.reviewer.payoffs:
                v.append(Violation(f"reviewer.{g}", "missing reviewer payoff table"))
            else:
                t = scenario.reviewer.table(g)
                if t.shape != (k, k, k):
                    v.append(Violation(f"reviewer.{g}", f"reviewer table must be {k}x{k}x{k}"))
                elif not np.all(np.isfinite(t)):
                    v.append(Violation(f"reviewer.{g}", "reviewer payoffs must be finite"))
    if not scenario.tie_tolerance >= 0:
        v.append(Violation("tie_tolerance", "must be nonnegative"))
    return ValidationResult(tuple(v))


def canonical_binary(pi: float, phi: float, delta0: float, delta1: float) -> Scenario:
    """One-group binary problem with exogenous prevalence and null preferences."""
    for name, value, lo in (("pi", pi, 0.0), ("phi", phi, 0.5), ("delta0", delta0, 0.0), ("delta1", delta1, 0.0)):
        if not lo <= value <= 1.0:
            raise InputError(f"{name}={value} outside [{lo}, 1]")
    label = "G"
    return Scenario(
        k=2,
        groups=(Group(label, Logistic(0.0, 1.0), SymmetricBinary(phi), Exogenous(pi)),),
        preferences=NormalizedError({label: 0.0}, {label: 0.0}),
        algorithm=StochasticAlgorithm.from_binary({label: (delta0, delta1)}),
    )
