"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` (lines appear in the terminal summary)
or ``python3 tests/test_acceptance.py`` (lines go to stdout).
"""

from __future__ import annotations

import contextlib
import io as _io
import math
import time

import numpy as np
import pytest

from fairfeedback import io as scenario_io
from fairfeedback.cli import main
from fairfeedback.equilibrium import equilibrium_profile, separable_cells
from fairfeedback.model import Endogenous, Group, Scenario, Separable, StochasticAlgorithm, SymmetricBinary, Uniform
from fairfeedback.search import ScanSpec, scan
from fairfeedback.statistics import (
    WelfareDirection,
    accuracy_welfare_direction,
    confusion,
    general_confusion,
    normalized_eu,
    simulate_confusion,
)
from fairfeedback.verify import (
    verify_appendix_f,
    verify_arrovian,
    verify_asymmetric_ic,
    verify_prop_2,
    verify_theorem_1,
    verify_theorem_2,
)

RESULTS: dict[int, str] = {}


def record(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
    RESULTS[number] = line
    print(line)
    assert passed, line


@contextlib.contextmanager
def timer():
    box = {}
    start = time.perf_counter()
    yield box
    box["s"] = time.perf_counter() - start


def _claims(case, prefix: str):
    return [c for c in case.claims if c.description.startswith(prefix)]


def test_criterion_01_confusion_table():
    with timer() as t:
        c = confusion(0.8, 0.7, 0.6, 0.9)
        exact = np.array([c.W1, c.L1, c.L0, c.W0])
        err = float(np.max(np.abs(exact - [0.39, 0.21, 0.10, 0.30])))
        n = 10**6
        sim = simulate_confusion(0.8, 0.7, 0.6, 0.9, n, seed=2024)
        est = np.array([sim.W1, sim.L1, sim.L0, sim.W0])
        z = float(np.max(np.abs(est - exact) / np.sqrt(exact * (1 - exact) / n)))
    ok = err <= 1e-12 and z <= 4 and t["s"] < 1.0
    record(1, "binary confusion table reproduction", ok, f"max error {err:.1e}, max |z| {z:.2f}, {t['s']:.2f}s")


def test_criterion_02_normalized_eu_identity():
    rng = np.random.default_rng(11)
    with timer() as t:
        worst = 0.0
        for d0, d1, pi, phi, lam, gam in zip(*(rng.uniform(0, 1, (4, 10**4))), *(rng.uniform(-3, 3, (2, 10**4)))):
            phi = 0.5 + phi / 2
            cells = confusion(d0, d1, pi, phi)
            fnr = cells.L1 / pi
            fpr = cells.L0 / (1 - pi)
            worst = max(worst, abs(normalized_eu(d0, d1, pi, phi, lam, gam) - (pi * lam * fnr + (1 - pi) * gam * fpr)))
    ok = worst <= 1e-12 and t["s"] < 1.0
    record(2, "normalized expected utility identity", ok, f"max error {worst:.1e}, {t['s']:.2f}s")


def test_criterion_03_accuracy_direction():
    got = [accuracy_welfare_direction(*a) for a in ((-1, -1), (2, 2), (1, -1))]
    want = [WelfareDirection.INCREASING_IN_ACCURACY, WelfareDirection.DECREASING_IN_ACCURACY,
            WelfareDirection.NOT_MEASURABLE_BY_ACCURACY]
    record(3, "accuracy and welfare direction", got == want, ", ".join(g.value for g in got))


def test_criterion_04_erb_envy_free():
    with timer() as t:
        case = verify_theorem_1(trials=500, seed=42, tolerance=1e-6, projected=100)
    agree = _claims(case, "binary trials where ERB and EF")[0]
    eo = _claims(case, "binary trials consistent with EF")[0]
    proj = _claims(case, "ERB-projected")[0]
    ok = all(c.status == "pass" for c in (agree, eo, proj)) and agree.computed == 500 and proj.computed == 100
    ok = ok and t["s"] < 30
    record(4, "ERB iff EF, EF implies EO", ok,
           f"agree {agree.computed}/500, EF=>EO {eo.computed}/500, projected EF {proj.computed}/100, {t['s']:.1f}s")


def test_criterion_05_ternary_equal_opportunity():
    with timer() as t:
        case = verify_prop_2(3, 0.6)
    eo = _claims(case, "[decision only] equal opportunity")[0]
    erb = _claims(case, "ERB violated")[0]
    table = [c for c in case.claims if c.description.startswith("Pr[d=") and "Y" in c.description
             and c.provenance == "claimed"]
    disc = [c for c in table if c.status == "discrepancy" and abs(c.computed - 0.1) <= 1e-12 and c.expected == 0.0]
    ok = case.passed and eo.status == "pass" and erb.computed >= 0.5 and len(disc) == 2 and t["s"] < 1.0
    record(5, "ternary EO without ERB", ok,
           f"ERB residual {erb.computed:.3f}, {len(disc)} discrepancy rows (computed 0.1, stated 0), {t['s']:.2f}s")


def test_criterion_06_prejudice_free_parity():
    with timer() as t:
        case = verify_theorem_2(trials=500, seed=42)
    agree = _claims(case, "equal-weight trials")[0]
    witness = _claims(case, "w = (2, 1): PF holds while PP fails")[0]
    ok = agree.computed == 500 and witness.status == "pass" and t["s"] < 30
    record(6, "PF iff PP under equal consequences", ok,
           f"agree {agree.computed}/500, w=(2,1) witness {witness.computed}, {t['s']:.1f}s")


def test_criterion_07_reviewer_equivalence():
    with timer() as t:
        case = verify_appendix_f(trials=500, ternary=200, seed=42)
    binary = _claims(case, "binary trials where PF, EC and PP")[0]
    ternary = _claims(case, "k = 3 trials")[0]
    ok = binary.computed == 500 and ternary.computed == 200 and t["s"] < 30
    record(7, "reviewer PF iff EC iff PP", ok,
           f"binary all-agree {binary.computed}/500, k=3 PF/EC agree {ternary.computed}/200, {t['s']:.1f}s")


def test_criterion_08_separable_rates():
    dist = Uniform(-1.0, 1.0)
    sc = Scenario(2, (Group("G", dist, SymmetricBinary(0.9), Endogenous()),), Separable(1.0),
                  StochasticAlgorithm.from_binary({"G": (0.8, 0.7)}))
    ge = equilibrium_profile(sc)["G"]
    pi = ge.prevalence[1]
    joint = general_confusion(sc, "G", np.array([1 - pi, pi]))
    closed = separable_cells(1.0, 0.8, 0.7, 0.9, dist).as_matrix()
    err = float(np.max(np.abs(joint - closed)))
    ok = abs(ge.threshold - 0.4) <= 1e-12 and abs(pi - 0.7) <= 1e-12 and err <= 1e-9
    record(8, "separable equilibrium rates", ok, f"t* {ge.threshold:.6f}, pi* {pi:.6f}, cell error {err:.1e}")


def test_criterion_09_discriminatory_example():
    case = verify_arrovian(0.8, Uniform(-1.0, 1.0), Uniform(0.0, 2.0), 1.0)
    want = {
        "FPR_Y": 0.2, "FNR_Y": 0.2, "FNR_X (false-negative mass)": 0.5,
        "PPV_Y": 12 / 19, "NPV_Y": 28 / 31,
    }
    by_name = {c.description: c for c in case.claims}
    values_ok = all(abs(by_name[k].computed - v) <= 1e-9 for k, v in want.items())
    v_ok = all(c.status == "pass" for c in _claims(case, "max |V*_"))
    clean = _claims(case, "F_X(0) = 0: X error mass")[0].status == "pass"
    perfect = _claims(case, "group-constant algorithm")[0].status == "pass"
    ok = case.passed and values_ok and v_ok and clean and perfect
    record(9, "discriminatory algorithm example", ok,
           f"PPV_Y {by_name['PPV_Y'].computed:.6f}, NPV_Y {by_name['NPV_Y'].computed:.6f}, "
           f"value functions {'ok' if v_ok else 'off'}, perfect classifier {'ok' if perfect else 'off'}")


def test_criterion_10_asymmetric_ic():
    case = verify_asymmetric_ic(1.0, 0.8, 0.7, 0.9, 0.9, draws=100, bracket=1e-6)
    collapse = _claims(case, "phi0 = phi1")[0]
    cross = _claims(case, "random draws where best responses switch")[0]
    ok = case.passed and collapse.status == "pass" and cross.computed == 100
    record(10, "asymmetric incentive threshold", ok,
           f"collapse {collapse.computed:.6f} vs {collapse.expected:.6f}, crossover {cross.computed}/100")


def test_criterion_11_impossibility_scan():
    imp = scenario_io.load(scenario_io.shipped_scenario_path("impossibility-template.json"))
    eq = scenario_io.load(scenario_io.shipped_scenario_path("equal-base-rate-template.json"))
    spec = ScanSpec(resolution=0.05, predicates=("ERB", "PP"), tolerance=1e-6)
    with timer() as t:
        a = scan(imp, spec)
        b = scan(eq, spec)
    ok = a.nondegenerate_passes == 0 and b.passes > 0 and t["s"] < 20
    record(11, "impossibility scan", ok,
           f"unequal base rates: {a.nondegenerate_passes} nondegenerate passes; "
           f"equal base rates: {b.passes} passes; {t['s']:.1f}s")


def _capture(argv) -> tuple[int, str]:
    buf = _io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_criterion_12_determinism():
    audit = [_capture(["audit", "arrovian.json", "--format", "json"]) for _ in range(2)]
    ver = [_capture(["verify", "all", "--format", "json"]) for _ in range(2)]
    ok = audit[0] == audit[1] and ver[0] == ver[1] and audit[0][0] == 0 and ver[0][0] == 0
    record(12, "byte-identical reruns", ok,
           f"audit {len(audit[0][1])} bytes, verify all {len(ver[0][1])} bytes, exit codes {audit[0][0]}/{ver[0][0]}")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                with contextlib.redirect_stdout(_io.StringIO()):
                    fn()
            except AssertionError:
                failures += 1
            except Exception as exc:  # report crashes as failures too
                failures += 1
                RESULTS.setdefault(int(name.split("_")[2]), f"criterion {name} FAIL: {exc!r}")
    for number in sorted(RESULTS):
        print(RESULTS[number])
    raise SystemExit(1 if failures else 0)
