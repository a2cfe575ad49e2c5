"""Command-line interface: audit, verify, search and equilibrium.

Exit codes: 0 success, 1 assertion failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import io as _io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io as scenario_io
from . import verify as verify_mod
from .equilibrium import equilibrium_profile, group_envelope
from .fairness_statistical import _jsonable, check_ab, check_erb, check_pp, resolve_prevalences
from .model import InputError, Scenario
from .reviewer import (
    check_equal_consequences_reviewer,
    check_group_blind,
    check_prejudice_free_reviewer,
    verify_reviewer_equivalence,
)
from .search import BudgetExceeded, ScanSpec, endogenous_scan, scan
from .statistics import posterior
from .welfare import (
    check_envy_free,
    check_envy_free_ex_ante,
    check_envy_free_group_level,
    check_equal_consequences_weights,
    check_equal_opportunity,
    check_group_independence,
    check_prejudice_free,
    type_probe,
)

EXIT_OK, EXIT_ASSERTION, EXIT_INPUT = 0, 1, 2
OUT_ENV = "FAIRFEEDBACK_OUT"
DEFAULT_SEED = 42
ANALYTIC_DEFAULT = 1e-9


class CliInputError(Exception):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _out_dir(args) -> Path | None:
    out = args.out or os.environ.get(OUT_ENV) or None
    return Path(out) if out else None


def _emit(args, stem: str, json_text: str | None, tables: dict[str, str], summary: str | None = None) -> None:
    """Write files when an output directory is set; otherwise print to stdout."""
    out = _out_dir(args)
    want_json = args.format in ("json", "both")
    want_csv = args.format in ("csv", "both")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if want_json and json_text is not None:
            (out / f"{stem}.json").write_text(json_text)
            written.append(f"{stem}.json")
        if want_csv:
            for name, text in tables.items():
                (out / f"{stem}-{name}.csv").write_text(text)
                written.append(f"{stem}-{name}.csv")
        if summary:
            sys.stdout.write(summary)
        for name in written:
            sys.stdout.write(f"wrote {out / name}\n")
        return
    if summary:
        sys.stdout.write(summary)
    if want_json and json_text is not None:
        sys.stdout.write(json_text)
    if want_csv and not want_json:
        for name, text in tables.items():
            sys.stdout.write(f"# {name}\n{text}")


def _load(path: str) -> tuple[Scenario, str]:
    p = Path(path)
    if not p.is_file():
        shipped = scenario_io.shipped_scenario_path(path)
        if shipped.is_file():
            p = shipped
        else:
            raise CliInputError([f"{path}: no such file"])
    data = p.read_bytes()
    try:
        scenario = scenario_io.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise CliInputError([f"{path}: not UTF-8 ({exc})"]) from exc
    except scenario_io.ScenarioFormatError as exc:
        raise CliInputError(exc.errors) from exc
    except (InputError, ValueError) as exc:
        raise CliInputError([str(exc)]) from exc
    return scenario, scenario_io.content_hash(data)


def _modes(flag: str) -> tuple[str, ...]:
    return ("exogenous", "equilibrium") if flag == "both" else (flag,)


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


def build_audit(scenario: Scenario, digest: str, name: str, tolerance: float, prevalence: str, seed: int) -> dict:
    profile = equilibrium_profile(scenario)
    probe = type_probe(scenario)
    flags = {
        "full_support": {g.id: bool(g.distribution.full_support) for g in scenario.groups},
        "regularity": {
            ge.group: {"holds": ge.regularity.holds,
                       "generic_uniqueness": ge.regularity.generic_uniqueness,
                       "each_behavior_optimal": ge.regularity.each_behavior_optimal}
            for ge in profile.groups
        },
        "affine_in_type": True,
    }
    notes = []
    if not all(flags["full_support"].values()):
        notes.append("full-support assumption violated")
    if not all(v["holds"] for v in flags["regularity"].values()):
        notes.append("best-response regularity violated")

    statistical = {}
    for mode in _modes(prevalence):
        prev = resolve_prevalences(scenario, mode)
        statistical[mode] = {
            "prevalences": {g: [float(x) for x in p] for g, p in prev.items()},
            "ERB": check_erb(scenario, prev, tolerance).to_dict(),
            "AB": check_ab(scenario, prev, tolerance).to_dict(),
            "PP": check_pp(scenario, prev, tolerance).to_dict(),
            "PF": check_prejudice_free(scenario, prev, tolerance).to_dict(),
        }
    welfare = {
        "GI": check_group_independence(scenario.preferences, tolerance).to_dict(),
        "EO": check_equal_opportunity(scenario, probe, tolerance).to_dict(),
        "EF": check_envy_free(scenario, probe, tolerance).to_dict(),
        "EF-ex-ante": check_envy_free_ex_ante(scenario, tolerance).to_dict(),
        "EF-group-level": check_envy_free_group_level(scenario, tolerance).to_dict(),
        "EC": check_equal_consequences_weights(scenario, tolerance).to_dict(),
    }
    report = {
        "engine": {"name": "fairfeedback", "version": __version__},
        "seed": seed,
        "config": {"tolerance": tolerance, "prevalence": prevalence},
        "scenario": {"name": name, "content_hash": digest, "document": scenario_io.scenario_to_dict(scenario)},
        "flags": flags,
        "notes": notes,
        "equilibrium": profile.to_dict(),
        "statistical": statistical,
        "welfare": welfare,
        "value_table": _value_rows(scenario, probe),
    }
    if scenario.reviewer is not None:
        prev = resolve_prevalences(scenario, _modes(prevalence)[0])
        rev = scenario.reviewer
        report["reviewer"] = {
            "group_blind": check_group_blind(rev, tolerance).to_dict(),
            "PF-reviewer": check_prejudice_free_reviewer(scenario, rev, prev, tolerance).to_dict(),
            "EC-reviewer": check_equal_consequences_reviewer(scenario, rev, prev, tolerance).to_dict(),
            "equivalence": verify_reviewer_equivalence(scenario, rev, prev, tolerance).to_dict(),
        }
    return report


def _value_rows(scenario: Scenario, probe) -> list[dict]:
    """V*(t) for each group under each group's package, at the probe points."""
    labels = scenario.labels
    envs = {(g, h): group_envelope(scenario, g, h) for g in labels for h in labels}
    ts = np.array(probe.points)
    cols = {f"{g}|{h}": envs[(g, h)].values(ts) for g in labels for h in labels}
    return [{"t": float(t), **{k: float(v[i]) for k, v in cols.items()}} for i, t in enumerate(ts)]


def _audit_tables(scenario: Scenario, report: dict) -> dict[str, str]:
    conf_rows, post_rows = [], []
    for mode, block in report["statistical"].items():
        for g in scenario.labels:
            prev = np.array(block["prevalences"][g])
            joint = prev[:, None] * scenario.conditional(g)
            for b in range(scenario.k):
                for d in range(scenario.k):
                    conf_rows.append([mode, g, b, d, float(joint[b, d])])
            post = posterior(scenario, g, prev)
            for d in range(scenario.k):
                if not post.reachable(d):
                    continue
                for b in range(scenario.k):
                    post_rows.append([mode, g, d, b, float(post.h(d, b))])
    values = report["value_table"]
    keys = list(values[0]) if values else ["t"]
    return {
        "confusion": _csv(["prevalence", "group", "behavior", "decision", "probability"], conf_rows),
        "posteriors": _csv(["prevalence", "group", "decision", "behavior", "posterior"], post_rows),
        "values": _csv(keys, [[row[k] for k in keys] for row in values]),
    }


def cmd_audit(args) -> int:
    scenario, digest = _load(args.file)
    tol = ANALYTIC_DEFAULT if args.tolerance is None else args.tolerance
    report = build_audit(scenario, digest, Path(args.file).name, tol, args.prevalence, args.seed)
    _emit(args, "audit", _dump(report), _audit_tables(scenario, report))
    return EXIT_OK


# ---------------------------------------------------------------------------
# equilibrium
# ---------------------------------------------------------------------------


def cmd_equilibrium(args) -> int:
    scenario, digest = _load(args.file)
    profile = equilibrium_profile(scenario)
    doc = {"content_hash": digest, "engine": {"name": "fairfeedback", "version": __version__},
           "equilibrium": profile.to_dict()}
    rows = []
    for ge in profile.groups:
        for b, row in enumerate(ge.joint):
            for d, p in enumerate(row):
                rows.append([ge.group, b, d, p])
    tables = {"joint": _csv(["group", "behavior", "decision", "probability"], rows)}
    _emit(args, "equilibrium", _dump(doc), tables)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _case_kwargs(fn, args) -> dict:
    params = inspect.signature(fn).parameters
    candidates = {"seed": args.seed, "tolerance": args.tolerance, "trials": args.trials, "m": args.m, "phi": args.phi}
    return {k: v for k, v in candidates.items() if k in params and v is not None}


def cmd_verify(args) -> int:
    if args.case == "all":
        names = list(verify_mod.ALL_CASES)
    elif args.case in verify_mod.CASES:
        names = [args.case]
    else:
        raise CliInputError([f"unknown case {args.case!r}; available: all, {', '.join(verify_mod.CASES)}"])
    cases = []
    for name in names:
        fn = verify_mod.CASES[name]
        kwargs = _case_kwargs(fn, args) if args.case != "all" else _case_kwargs(fn, _only_seed(args))
        try:
            cases.append(fn(**kwargs))
        except InputError as exc:
            raise CliInputError([f"{name}: {exc}"]) from exc
    passed = all(c.passed for c in cases)
    doc = {"engine": {"name": "fairfeedback", "version": __version__}, "passed": passed,
           "cases": [c.to_dict() for c in cases]}
    table = "\n".join(c.render() for c in cases) + "\n"
    rows = [[c.name, cl.status, cl.provenance, cl.description, json.dumps(cl.to_dict()["computed"]),
             json.dumps(cl.to_dict()["expected"])] for c in cases for cl in c.claims]
    tables = {"claims": _csv(["case", "status", "provenance", "claim", "computed", "expected"], rows)}
    _emit(args, f"verify-{args.case}", _dump(doc) if args.format != "csv" else None, tables, summary=table)
    return EXIT_OK if passed else EXIT_ASSERTION


def _only_seed(args):
    """``verify all`` runs default parameters; only seed and tolerance carry over."""
    return argparse.Namespace(seed=args.seed, tolerance=args.tolerance, trials=None, m=None, phi=None)


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


def cmd_search(args) -> int:
    template, digest = _load(args.template)
    predicates = tuple(p.strip().upper() for p in args.predicates.split(",") if p.strip())
    try:
        spec = ScanSpec(
            resolution=args.resolution,
            predicates=predicates,
            prevalence=args.prevalence_mode,
            tolerance=1e-6 if args.tolerance is None else args.tolerance,
            depth=args.depth,
            budget=args.budget,
        )
        result = endogenous_scan(template, spec) if spec.prevalence == "endogenous" else scan(template, spec)
    except BudgetExceeded as exc:
        raise CliInputError([str(exc)]) from exc
    except (ValueError, InputError) as exc:
        raise CliInputError([str(exc)]) from exc
    summary = {"content_hash": digest, **result.summary()}
    line = f"passes: {result.passes}\nnondegenerate passes: {result.nondegenerate_passes}\n"
    _emit(args, "search", _dump(summary), {"cells": result.to_csv()}, summary=line)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None,
                        help="predicate tolerance (default 1e-9 analytic, 1e-6 for scans)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV}, else stdout)")
    common.add_argument("--format", choices=("json", "csv", "both"), default="both")
    common.add_argument("--prevalence", choices=("exogenous", "equilibrium", "both"), default="both",
                        help="prevalence used by the statistical predicates")

    parser = argparse.ArgumentParser(prog="fairfeedback", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fairfeedback {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit", parents=[common], help="run every predicate on a scenario")
    p.add_argument("file", help="scenario JSON (or the name of a shipped scenario)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("equilibrium", parents=[common], help="equilibrium profile of a scenario")
    p.add_argument("file")
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("verify", parents=[common], help="run a verification case")
    p.add_argument("case", help=f"one of: all, {', '.join(verify_mod.CASES)}")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--phi", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=[common], help="lattice scan over per-group algorithms")
    p.add_argument("template")
    p.add_argument("--predicates", default="ERB,PP", help="comma-separated subset of ERB,PP,AB,EO,EF,PF")
    p.add_argument("--resolution", type=float, default=0.05)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--prevalence-mode", choices=("exogenous", "endogenous"), default="exogenous")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliInputError as exc:
        sys.stderr.write(json.dumps({"errors": exc.errors}, indent=2) + "\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
