import pytest

from fairfeedback.model import (
    Endogenous,
    Exogenous,
    Group,
    Logistic,
    NormalizedError,
    Scenario,
    Separable,
    StochasticAlgorithm,
    SymmetricBinary,
)


def two_groups(phi=(0.8, 0.8), deltas=((0.8, 0.7), (0.8, 0.7)), pi=(0.3, 0.6), prefs=None,
               dists=(Logistic(0.0, 1.0), Logistic(0.0, 1.0)), weights=None, reviewer=None):
    """Binary X/Y scenario; ``pi=None`` makes both groups endogenous."""
    groups = tuple(
        Group(g, dists[i], SymmetricBinary(phi[i]), Endogenous() if pi is None else Exogenous(pi[i]))
        for i, g in enumerate(("X", "Y"))
    )
    if prefs is None:
        prefs = NormalizedError({"X": 1.0, "Y": 1.0}, {"X": 1.0, "Y": 1.0})
    return Scenario(2, groups, prefs, StochasticAlgorithm.from_binary({"X": deltas[0], "Y": deltas[1]}),
                    ex_post_weights=weights or {}, reviewer=reviewer)


@pytest.fixture
def separable_pair():
    return two_groups(phi=(0.9, 0.9), pi=None, prefs=Separable(1.0))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
