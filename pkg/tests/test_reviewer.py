import numpy as np
import pytest

from fairfeedback.fairness_statistical import resolve_prevalences
from fairfeedback.model import ReviewerPreferences
from fairfeedback.reviewer import (
    check_equal_consequences_reviewer,
    check_group_blind,
    check_prejudice_free_reviewer,
    reviewer_policy,
    verify_reviewer_equivalence,
)
from fairfeedback.verify import random_reviewer_scenario

from conftest import two_groups

MATCH = ReviewerPreferences.matching(2, ("X", "Y"))


def test_zero_reviewer():
    sc = two_groups()
    zero = ReviewerPreferences.group_blind(np.zeros((2, 2, 2)), ("X", "Y"))
    pol = reviewer_policy(sc, zero, resolve_prevalences(sc))
    for c in pol.choices.values():
        assert c.optimal == frozenset({0, 1}) and c.value == 0.0


def test_matching_follows_majority():
    sc = two_groups(pi=(0.6, 0.6))
    pol = reviewer_policy(sc, MATCH, resolve_prevalences(sc))
    assert pol.get(1, "X").optimal == frozenset({1})


def test_group_blind_checks():
    assert check_group_blind(MATCH).verdict == "satisfied"
    table = MATCH.table("X").copy()
    other = table.copy()
    other[1, 1, 1] += 1.0
    rep = check_group_blind(ReviewerPreferences({"X": table, "Y": other}))
    assert rep.verdict == "violated" and rep.residual == pytest.approx(1.0)
    assert check_group_blind(ReviewerPreferences.matching(2, ("X",))).verdict == "vacuous"


def test_pp_algorithm_gives_equal_policies():
    sc = two_groups(pi=(0.4, 0.4), reviewer=MATCH)
    p = resolve_prevalences(sc)
    pol = reviewer_policy(sc, MATCH, p)
    for d in range(2):
        assert pol.get(d, "X").optimal == pol.get(d, "Y").optimal
    assert check_prejudice_free_reviewer(sc, MATCH, p).verdict == "satisfied"
    assert check_equal_consequences_reviewer(sc, MATCH, p).verdict == "satisfied"
    rep = verify_reviewer_equivalence(sc, MATCH, p)
    assert (rep.pf.verdict, rep.ec.verdict, rep.pp.verdict) == ("satisfied",) * 3


def test_always_one_unequal_prevalence():
    sc = two_groups(deltas=((0.0, 1.0), (0.0, 1.0)), pi=(0.3, 0.6))
    p = resolve_prevalences(sc)
    pf = check_prejudice_free_reviewer(sc, MATCH, p)
    assert pf.verdict == "violated"
    assert sorted(pf.witness["values"]) == pytest.approx([0.6, 0.7])


def test_non_blind_disjoint_argmax():
    sc = two_groups(pi=(0.4, 0.4))
    tx = np.zeros((2, 2, 2)); tx[1, :, 1] = 1.0
    ty = np.zeros((2, 2, 2)); ty[0, :, 1] = 1.0
    rev = ReviewerPreferences({"X": tx, "Y": ty})
    p = resolve_prevalences(sc)
    assert check_equal_consequences_reviewer(sc, rev, p).verdict == "violated"
    rep = verify_reviewer_equivalence(sc, rev, p)
    assert rep.asserted == () and rep.to_dict()["hypothesis"] == "hypothesis unmet"


def test_ternary_asserts_only_pf_ec():
    sc, rev = random_reviewer_scenario(np.random.default_rng(0), 3, pp=True)
    rep = verify_reviewer_equivalence(sc, rev, resolve_prevalences(sc))
    assert rep.asserted == ("PF<->EC",)
    assert rep.consistent
