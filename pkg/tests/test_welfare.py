import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairfeedback.equilibrium import value
from fairfeedback.fairness_statistical import check_pp, resolve_prevalences
from fairfeedback.model import AffineTable, Logistic, Normal, NormalizedError, Separable, Uniform
from fairfeedback.verify import _binary_pf_pp_scenario, arrovian_scenario, prop2_binary_scenario, prop2_scenario
from fairfeedback.welfare import (
    check_envy_free,
    check_envy_free_ex_ante,
    check_envy_free_group_level,
    check_equal_consequences_weights,
    check_equal_opportunity,
    check_group_independence,
    check_prejudice_free,
    type_probe,
)

from conftest import two_groups

ARROVIAN = arrovian_scenario(0.8, Uniform(-1, 1), Uniform(0, 2))


def test_group_independence():
    assert check_group_independence(Separable(1.0)).residual == 0.0
    assert check_group_independence(prop2_binary_scenario().preferences).residual == pytest.approx(2.0)
    table = {(b, d, g): (float(b + d), 0.5) for b in range(2) for d in range(2) for g in ("X", "Y")}
    assert check_group_independence(AffineTable(table)).verdict == "satisfied"
    assert check_group_independence(NormalizedError({"X": 1, "Y": 2}, {"X": 1, "Y": 1})).verdict == "violated"


def test_eo_identical_groups(separable_pair):
    rep = check_equal_opportunity(separable_pair)
    assert rep.verdict == "satisfied" and rep.residual == 0.0


def test_eo_equal_responsiveness_different_algorithms():
    sc = two_groups(phi=(0.9, 0.9), deltas=((0.8, 0.7), (0.9, 0.6)), pi=None, prefs=Separable(1.0))
    assert check_equal_opportunity(sc).verdict == "satisfied"


def test_eo_ternary():
    assert check_equal_opportunity(prop2_scenario(3, 0.6)).verdict == "satisfied"


def test_ef_identical_and_arrovian(separable_pair):
    assert check_envy_free(separable_pair).verdict == "satisfied"
    assert value(ARROVIAN, "X", 0.5) == pytest.approx(0.0)
    assert value(ARROVIAN, "Y", 0.5) == pytest.approx(0.3)
    rep = check_envy_free(ARROVIAN)
    assert rep.verdict == "violated" and rep.residual >= 0.3


def test_ex_ante_and_group_level():
    assert check_envy_free_ex_ante(ARROVIAN).verdict == "violated"
    assert check_envy_free_group_level(ARROVIAN).verdict == "violated"
    sc = two_groups(phi=(0.9, 0.9), pi=None, prefs=Separable(1.0), dists=(Logistic(0, 1), Normal(1, 2)))
    assert check_envy_free_ex_ante(sc).verdict == "satisfied"
    assert check_envy_free_group_level(sc).verdict == "satisfied"


def test_pf_and_ec_weights():
    sc = two_groups(pi=(0.4, 0.4), weights={"X": 1.0, "Y": 1.0})
    p = resolve_prevalences(sc)
    assert check_pp(sc, p).passed and check_prejudice_free(sc, p).passed
    assert check_equal_consequences_weights(sc).verdict == "satisfied"
    sc2 = _binary_pf_pp_scenario(0.4, 0.8, 0.8, 0.8, (0.0, 1.0), (0.0, 1.0), (2.0, 1.0))
    p2 = resolve_prevalences(sc2)
    assert check_prejudice_free(sc2, p2).verdict == "satisfied"
    assert check_pp(sc2, p2).verdict == "violated"
    ec = check_equal_consequences_weights(sc2)
    assert ec.verdict == "violated" and ec.residual == pytest.approx(1.0)


def test_ec_single_group_vacuous():
    from fairfeedback.model import canonical_binary
    assert check_equal_consequences_weights(canonical_binary(0.5, 0.9, 0.8, 0.7)).verdict == "vacuous"


def test_probe_contains_thresholds():
    pts = type_probe(ARROVIAN).points
    assert any(abs(t - 0.6) <= 2e-6 for t in pts)


def _scaled(prefs_scale):
    c = np.array([[0.3, 0.9], [0.1, 1.0]]) * prefs_scale
    m = np.array([[1.0, 1.0], [0.0, 0.0]]) * prefs_scale
    return AffineTable.from_arrays({"X": (c, m), "Y": (c, m)})


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.05, 0.95),
       st.floats(0.1, 10.0))
def test_positive_rescaling_preserves_verdicts(a, b, c, d, scale):
    base = two_groups(phi=(0.85, 0.7), deltas=((a, b), (c, d)), pi=None, prefs=_scaled(1.0))
    scaled = two_groups(phi=(0.85, 0.7), deltas=((a, b), (c, d)), pi=None, prefs=_scaled(scale))
    for check in (check_envy_free, check_equal_opportunity):
        r0, r1 = check(base, tolerance=1e-9), check(scaled, tolerance=1e-9 * scale)
        assert r0.verdict == r1.verdict
