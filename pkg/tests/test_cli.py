import json

import pytest

from fairfeedback.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_audit_arrovian(capsys):
    code, out, _ = run(capsys, "audit", "arrovian.json", "--format", "json")
    assert code == 0
    report = json.loads(out)
    stat = report["statistical"]["equilibrium"]
    assert stat["ERB"]["verdict"] == "violated"
    assert stat["PP"]["skipped"]
    assert report["welfare"]["EF"]["verdict"] == "violated"
    assert "full-support assumption violated" in report["notes"]
    row = report["value_table"][0]
    assert row["Y|Y"] >= row["X|X"]


def test_audit_symmetric(capsys):
    code, out, _ = run(capsys, "audit", "symmetric.json", "--format", "json")
    report = json.loads(out)
    verdicts = [v["verdict"] for block in report["statistical"].values() for k, v in block.items() if k != "prevalences"]
    verdicts += [v["verdict"] for v in report["welfare"].values()]
    assert code == 0 and all(v == "satisfied" for v in verdicts)
    assert report["notes"] == []


def test_audit_bad_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"k": 2}')
    code, _, err = run(capsys, "audit", str(bad))
    assert code == 2 and json.loads(err)["errors"]


def test_audit_writes_files(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("FAIRFEEDBACK_OUT", str(tmp_path))
    code, _, _ = run(capsys, "audit", "compas-style.json")
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["audit-confusion.csv", "audit-posteriors.csv", "audit-values.csv", "audit.json"]
    assert "reviewer" in json.loads((tmp_path / "audit.json").read_text())


def test_audit_deterministic(capsys):
    _, a, _ = run(capsys, "audit", "compas-style.json", "--format", "json")
    _, b, _ = run(capsys, "audit", "compas-style.json", "--format", "json")
    assert a == b


def test_equilibrium_command(capsys):
    code, out, _ = run(capsys, "equilibrium", "separable-uniform.json", "--format", "json")
    assert code == 0
    assert json.loads(out)["equilibrium"]["G"]["threshold"] == pytest.approx(0.4)


def test_verify_ternary_case(capsys):
    code, out, _ = run(capsys, "verify", "prop2", "--m", "3", "--phi", "0.6", "--format", "csv")
    assert code == 0 and "discrepancy" in out


def test_verify_unknown_case(capsys):
    code, _, err = run(capsys, "verify", "nope")
    assert code == 2 and "theorem1" in err


def test_verify_bad_domain(capsys):
    code, _, _ = run(capsys, "verify", "prop2", "--m", "2")
    assert code == 2


def test_search_impossibility(capsys):
    code, out, _ = run(capsys, "search", "impossibility-template.json", "--format", "csv")
    assert code == 0 and "nondegenerate passes: 0" in out


def test_search_budget(capsys):
    code, _, err = run(capsys, "search", "equal-base-rate-template.json", "--resolution", "0.01")
    assert code == 2 and "evaluations" in err


def test_search_ef_equals_erb(capsys, tmp_path):
    sets = {}
    for pred in ("EF", "ERB"):
        out = tmp_path / pred
        run(capsys, "search", "symmetric.json", "--predicates", pred, "--resolution", "0.1", "--depth", "0",
            "--prevalence-mode", "endogenous", "--out", str(out), "--format", "csv")
        lines = (out / "search-cells.csv").read_text().splitlines()[1:]
        sets[pred] = {tuple(line.split(",")[1:5]) for line in lines}
    assert sets["EF"] == sets["ERB"] and sets["EF"]


def test_bad_flag(capsys):
    assert main(["audit"]) == 2
