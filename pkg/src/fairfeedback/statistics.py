"""Confusion statistics, error rates and Bayesian posteriors at a given prevalence."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import Scenario

REACHABILITY_TOL = 1e-12


@dataclass(frozen=True)
class ConfusionTable:
    """Joint cell probabilities. ``L1`` is the false negative, ``L0`` the false positive."""

    W1: float
    L1: float
    L0: float
    W0: float

    @property
    def accuracy(self) -> float:
        return self.W1 + self.W0

    def as_matrix(self) -> np.ndarray:
        """Indexed ``[beta][d]``."""
        return np.array([[self.W0, self.L0], [self.L1, self.W1]])

    @classmethod
    def from_matrix(cls, joint: np.ndarray) -> ConfusionTable:
        return cls(W1=float(joint[1, 1]), L1=float(joint[1, 0]), L0=float(joint[0, 1]), W0=float(joint[0, 0]))

    def rates(self) -> RateBundle:
        pos = self.W1 + self.L1
        neg = self.W0 + self.L0
        tpr = self.W1 / pos if pos > 0 else float("nan")
        tnr = self.W0 / neg if neg > 0 else float("nan")
        return RateBundle(tpr=tpr, tnr=tnr, fpr=1.0 - tnr, fnr=1.0 - tpr, accuracy=self.accuracy)


@dataclass(frozen=True)
class RateBundle:
    tpr: float
    tnr: float
    fpr: float
    fnr: float
    accuracy: float


def confusion(delta0: float, delta1: float, pi: float, phi: float) -> ConfusionTable:
    """Symmetric-binary confusion cells evaluated from the closed forms."""
    return ConfusionTable(
        W1=pi * (phi * delta1 + (1 - phi) * (1 - delta0)),
        L1=pi * (phi * (1 - delta1) + (1 - phi) * delta0),
        L0=(1 - pi) * (phi * (1 - delta0) + (1 - phi) * delta1),
        W0=(1 - pi) * (phi * delta0 + (1 - phi) * (1 - delta1)),
    )


def general_confusion(scenario: Scenario, group: str, prevalence) -> np.ndarray:
    """Joint table ``Pr[beta, d]`` for one group, marginalizing the signal."""
    p = np.asarray(prevalence, dtype=float)
    return p[:, None] * scenario.conditional(group)


def error_rates(delta0: float, delta1: float, phi: float) -> tuple[float, float]:
    """``(fnr, fpr)`` of a binary algorithm under a symmetric signal."""
    fnr = phi + delta0 - phi * (delta0 + delta1)
    fpr = phi + delta1 - phi * (delta0 + delta1)
    return fnr, fpr


def normalized_eu(delta0, delta1, pi, phi, lam, gamma) -> float:
    """Ex-ante payoff with zero payoff on correct outcomes.

    Composition order: ``pi * lam * fnr + (1 - pi) * gamma * fpr``.
    """
    fnr, fpr = error_rates(delta0, delta1, phi)
    return pi * lam * fnr + (1 - pi) * gamma * fpr


class WelfareDirection(enum.Enum):
    INCREASING_IN_ACCURACY = "IncreasingInAccuracy"
    DECREASING_IN_ACCURACY = "DecreasingInAccuracy"
    NOT_MEASURABLE_BY_ACCURACY = "NotMeasurableByAccuracy"
    DEGENERATE = "Degenerate"


def accuracy_welfare_direction(lam: float, gamma: float) -> WelfareDirection:
    """How the normalized payoff moves with accuracy when ``|lam| = |gamma| != 0``."""
    if lam == 0 or abs(lam) != abs(gamma):
        return WelfareDirection.DEGENERATE
    if lam == gamma:
        return WelfareDirection.INCREASING_IN_ACCURACY if lam < 0 else WelfareDirection.DECREASING_IN_ACCURACY
    return WelfareDirection.NOT_MEASURABLE_BY_ACCURACY


@dataclass(frozen=True)
class Posterior:
    """``rows[d]`` is the distribution over behaviors given decision ``d``, or None if unreachable."""

    decision_probs: tuple[float, ...]
    rows: tuple[tuple[float, ...] | None, ...]

    def reachable(self, d: int) -> bool:
        return self.rows[d] is not None

    def h(self, d: int, beta: int) -> float:
        row = self.rows[d]
        if row is None:
            raise ValueError(f"decision {d} is unreachable")
        return row[beta]


def posterior_from_joint(joint: np.ndarray) -> Posterior:
    pd = joint.sum(axis=0)
    rows = []
    for d, mass in enumerate(pd):
        if mass < REACHABILITY_TOL:
            rows.append(None)
        else:
            rows.append(tuple(float(x) for x in joint[:, d] / mass))
    return Posterior(tuple(float(x) for x in pd), tuple(rows))


def posterior(scenario: Scenario, group: str, prevalence) -> Posterior:
    return posterior_from_joint(general_confusion(scenario, group, prevalence))


def simulate_confusion(delta0, delta1, pi, phi, n: int, seed: int) -> ConfusionTable:
    """Monte-Carlo frequencies of the four binary cells (PCG64 generator)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    beta = rng.random(n) < pi
    correct_signal = rng.random(n) < phi
    s = np.where(correct_signal, beta, ~beta)
    match = rng.random(n) < np.where(s, delta1, delta0)
    d = np.where(match, s, ~s)
    return ConfusionTable(
        W1=float(np.mean(beta & d)),
        L1=float(np.mean(beta & ~d)),
        L0=float(np.mean(~beta & d)),
        W0=float(np.mean(~beta & ~d)),
    )
