import numpy as np
import pytest

from fairfeedback import io
from fairfeedback.fairness_statistical import check_erb, resolve_prevalences
from fairfeedback.model import Logistic, Normal, Separable, StochasticAlgorithm
from fairfeedback.search import BudgetExceeded, Infeasible, ScanSpec, endogenous_scan, project_to_erb, scan

from conftest import two_groups

IMPOSSIBILITY = io.load(io.shipped_scenario_path("impossibility-template.json"))
EQUAL = io.load(io.shipped_scenario_path("equal-base-rate-template.json"))


def test_erb_scan_contains_diagonal():
    res = scan(EQUAL, ScanSpec(resolution=0.25, predicates=("ERB",), depth=0))
    cells = res.pass_set()
    for i in range(5):
        for j in range(5):
            assert (i / 4, j / 4, i / 4, j / 4) in cells


def test_impossibility_scan():
    res = scan(IMPOSSIBILITY, ScanSpec(resolution=0.05, predicates=("ERB", "PP"), tolerance=1e-6))
    assert res.nondegenerate_passes == 0


def test_equal_base_rate_scan():
    res = scan(EQUAL, ScanSpec(resolution=0.05, predicates=("ERB", "PP"), tolerance=1e-6))
    assert res.nondegenerate_passes > 0


def test_refinement_keeps_parents():
    res = scan(EQUAL, ScanSpec(resolution=0.25, predicates=("ERB", "PP"), depth=2))
    levels = {r["level"] for r in res.rows}
    assert levels == {0, 1, 2}
    assert res.levels[1]["passes"] >= res.levels[0]["passes"]


def test_scan_deterministic_csv():
    spec = ScanSpec(resolution=0.25, predicates=("ERB", "PP"), depth=1)
    assert scan(EQUAL, spec).to_csv() == scan(EQUAL, spec).to_csv()


def test_budget_rejected():
    with pytest.raises(BudgetExceeded) as err:
        scan(EQUAL, ScanSpec(resolution=0.01, budget=10**6))
    assert err.value.estimate == 101**4


@pytest.mark.parametrize("kwargs", [{"resolution": 0.3}, {"resolution": 0.6}, {"depth": 7}, {"predicates": ("XYZ",)}])
def test_bad_spec(kwargs):
    with pytest.raises(ValueError):
        ScanSpec(**kwargs)


def test_ef_pass_set_equals_erb_pass_set():
    template = two_groups(phi=(0.9, 0.8), pi=None, prefs=Separable(1.0), dists=(Logistic(0, 1), Normal(0.5, 1)))
    ef = endogenous_scan(template, ScanSpec(resolution=0.1, predicates=("EF",), prevalence="endogenous", depth=0))
    erb = endogenous_scan(template, ScanSpec(resolution=0.1, predicates=("ERB",), prevalence="endogenous", depth=0))
    assert ef.pass_set() == erb.pass_set() and len(ef.pass_set()) > 0


def test_endogenous_symmetric_diagonal():
    template = two_groups(phi=(0.9, 0.9), pi=None, prefs=Separable(1.0))
    res = endogenous_scan(template, ScanSpec(resolution=0.25, predicates=("ERB", "PP"), prevalence="endogenous", depth=0))
    assert (0.75, 0.5, 0.75, 0.5) in res.pass_set()


def test_project_identical_signal():
    sc = two_groups(phi=(0.8, 0.8), deltas=((0.8, 0.7), (0.1, 0.2)))
    alg = project_to_erb(sc, "Y")
    assert np.allclose(alg.binary("Y"), (0.8, 0.7))


def test_project_example():
    sc = two_groups(phi=(0.9, 0.8), deltas=((0.8, 0.7), (0.5, 0.5)))
    alg = project_to_erb(sc, "Y")
    d0, d1 = alg.binary("Y")
    assert 0.8 * d1 + 0.2 * (1 - d0) == pytest.approx(0.65, abs=1e-12)
    assert 0.8 * d0 + 0.2 * (1 - d1) == pytest.approx(0.75, abs=1e-12)
    fixed = sc.with_algorithm(alg)
    assert check_erb(fixed, resolve_prevalences(fixed)).residual <= 1e-12


def test_project_infeasible():
    sc = two_groups(phi=(1.0, 0.5), deltas=((1.0, 1.0), (0.5, 0.5)))
    assert isinstance(project_to_erb(sc, "Y"), Infeasible)
