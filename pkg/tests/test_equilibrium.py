import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairfeedback.equilibrium import (
    NOT_THRESHOLD,
    best_response,
    equilibrium_profile,
    expected_utility,
    responsiveness,
    threshold,
    value,
)
from fairfeedback.model import (
    AffineTable,
    AsymmetricBinary,
    Endogenous,
    Group,
    Logistic,
    Scenario,
    Separable,
    StochasticAlgorithm,
    SymmetricBinary,
    Uniform,
)
from fairfeedback.statistics import general_confusion
from fairfeedback.verify import prop2_scenario


def single(delta=(0.8, 0.7), phi=0.9, dist=Uniform(-1.0, 1.0), prefs=Separable(1.0), signal=None):
    g = Group("G", dist, signal or SymmetricBinary(phi), Endogenous())
    return Scenario(2, (g,), prefs, StochasticAlgorithm.from_binary({"G": delta}))


def test_zero_payoffs():
    zeros = AffineTable({(b, d, "G"): (0.0, 0.0) for b in range(2) for d in range(2)})
    sc = single(prefs=zeros)
    assert expected_utility(sc, "G", 0.7, 1) == 0.0 and value(sc, "G", -3.0) == 0.0
    assert best_response(sc, "G", 0.2).optimal == (0, 1)


def test_low_types_choose_one():
    sc = single(dist=Logistic(0.0, 1.0))
    t = sc.group("G").distribution.quantile(1e-6)
    assert best_response(sc, "G", t).optimal == (1,)


def test_boundary_type_indifferent():
    sc = single()
    assert best_response(sc, "G", 0.4).optimal == (0, 1)
    assert best_response(sc, "G", 0.4).selected == 0


@pytest.mark.parametrize("args,expected", [((1, 1, 1), 1.0), ((0.8, 0.7, 0.9), 0.4), ((0.3, 0.7, 0.8), 0.0)])
def test_responsiveness(args, expected):
    assert responsiveness(*args) == pytest.approx(expected, abs=1e-12)


def test_threshold_examples():
    assert threshold(single(), "G") == pytest.approx(0.4, abs=1e-12)
    asym = single(signal=AsymmetricBinary(0.9, 0.9))
    assert threshold(asym, "G") == pytest.approx(0.4, abs=1e-12)
    assert threshold(single(delta=(0.3, 0.7)), "G") == pytest.approx(0.0, abs=1e-12)
    assert threshold(prop2_scenario(3, 0.6), "X") is NOT_THRESHOLD


def test_dominant_behavior_threshold():
    entries = {(b, d, "G"): (0.0, 0.0) for b in range(2) for d in range(2)}
    entries[(1, 1, "G")] = (1.0, 0.0)
    entries[(1, 0, "G")] = (1.0, 0.0)
    assert threshold(single(prefs=AffineTable(entries)), "G") == float("inf")


def test_uniform_separable_profile():
    prof = equilibrium_profile(single())
    ge = prof["G"]
    assert ge.threshold == pytest.approx(0.4, abs=1e-12)
    assert ge.prevalence[1] == pytest.approx(0.7, abs=1e-12)
    joint = general_confusion(single(), "G", np.array(ge.prevalence))
    assert np.allclose(ge.confusion.as_matrix(), joint, atol=1e-12)
    assert ge.reward == pytest.approx(ge.confusion.W1 + ge.confusion.L0)
    assert ge.regularity.holds


@settings(max_examples=40, deadline=None)
@given(st.floats(0.55, 1.0), st.floats(-1.0, 1.0))
def test_null_algorithm_prevalence(phi, mu):
    dist = Logistic(mu, 1.0)
    prof = equilibrium_profile(single(delta=(0.4, 0.6), phi=phi, dist=dist))
    assert prof["G"].prevalence[1] == pytest.approx(float(dist.cdf(0.0)), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.5, 1.0), st.floats(-3.0, 3.0))
def test_value_is_max_of_eu(d0, d1, phi, t):
    sc = single(delta=(d0, d1), phi=phi, dist=Logistic(0.0, 1.0))
    eu = [expected_utility(sc, "G", t, b) for b in range(2)]
    assert value(sc, "G", t) == pytest.approx(max(eu), abs=1e-12)


def test_ternary_endogenous_prevalence_sums_to_one():
    sc = prop2_scenario(3, 0.6).with_prevalences({"X": Endogenous(), "Y": Endogenous()})
    prof = equilibrium_profile(sc)
    assert sum(prof["X"].prevalence) == pytest.approx(1.0, abs=1e-12)
