import json
import subprocess
import sys

import pytest

from skewform.cli import main
from skewform.config import ENV_BUDGET_ENTRIES


def run_json(capsys, *args):
    code = main([*args, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_dims_sympl_plus(capsys):
    code, rep = run_json(capsys, "dims", "--family", "sympl-plus", "--n", "2")
    assert code == 0 and rep["overall"] == "holds"
    totals = {t["kind"]: sum(r["count"] for r in t["rows"]) for t in rep["tables"]}
    assert totals == {"invariants": 4, "covariants": 12}
    assert set(rep) >= {"version", "config_hash", "checks", "tables", "overall"}
    for c in rep["checks"]:
        assert set(c) >= {"name", "family", "n", "verdict", "timing_ms"}


def test_dims_with_oracle(capsys):
    code, rep = run_json(capsys, "dims", "--family", "orth-minus", "--m", "5", "--oracle")
    assert code == 0
    for t in rep["tables"]:
        assert all(r["oracle"] == r["count"] for r in t["rows"])
    totals = {t["kind"]: sum(r["count"] for r in t["rows"]) for t in rep["tables"]}
    assert totals == {"invariants": 4, "covariants": 16}


def test_dims_sympl_minus_one_csv(capsys):
    assert main(["dims", "--family", "sympl-minus", "--n", "1", "--csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "kind,family,degree,count,closed_form,oracle"
    inv = [l for l in lines if l.startswith("invariants")]
    cov = [l for l in lines if l.startswith("covariants")]
    assert sum(int(l.split(",")[3]) for l in inv) == 2
    assert sum(int(l.split(",")[3]) for l in cov) == 4


@pytest.mark.parametrize("args", [["verify", "rowen", "--n", "2"], ["verify", "hutchinson", "--n", "2"],
                                  ["verify", "relation", "--family", "sympl-minus", "--n", "1"],
                                  ["verify", "amitsur-levitzki", "--m", "3"]])
def test_verify_named(capsys, args):
    code, rep = run_json(capsys, *args)
    assert code == 0 and rep["checks"] and all(c["verdict"] == "holds" for c in rep["checks"])


def test_verify_failure_exit_code(capsys):
    code, rep = run_json(capsys, "verify", "rowen", "--n", "2", "--degree", "5")
    assert code == 1 and rep["overall"] == "fails"
    assert rep["checks"][0]["witness"]["subset"] == [0, 1, 2, 3, 4]


def test_certify(capsys):
    code, rep = run_json(capsys, "certify", "--family", "orth-plus", "--m", "3")
    assert code == 0
    basis = next(c for c in rep["checks"] if c["name"] == "free_basis")
    assert basis["details"]["total"] == 12
    code, rep = run_json(capsys, "certify", "--family", "full", "--m", "2")
    assert code == 0


def test_derive_relation(capsys):
    code, rep = run_json(capsys, "derive-relation", "--family", "orth-plus", "--m", "3")
    assert code == 0
    d = rep["checks"][0]["details"]
    assert d["unique"] and d["homogeneous"] and not d["printed_match"]
    code, rep = run_json(capsys, "derive-relation", "--family", "orth-minus", "--m", "5")
    assert code == 0 and rep["checks"][0]["details"]["printed_match"]


def test_sphere_json_lists_coefficients(capsys):
    code, rep = run_json(capsys, "sphere", "--n", "2")
    assert code == 0
    cov = rep["checks"][0]
    assert set(cov["details"]["coefficients"]) == {"omega1", "omega2", "theta1", "theta2"}
    spans = [c["details"]["span"] for c in rep["checks"][1:]]
    assert spans == [2, 2]


def test_usage_errors(capsys):
    assert main(["verify", "bogus"]) == 2
    assert main(["dims"]) == 2
    assert main(["dims", "--family", "full", "--m", "2"]) == 2
    assert main(["certify", "--family", "orth-plus", "--m", "4"]) == 2
    assert main(["verify", "--family", "sympl-plus", "--m", "3"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["certify", "--family", "full", "--m", "2", "--csv"]) == 2
    assert main(["sphere", "--n", "1"]) == 2
    capsys.readouterr()


def test_strict_budget_skip_exit_three(capsys):
    args = ["verify", "all", "--family", "sympl-plus", "--n", "2", "--budget-entries", "50"]
    assert main(args) == 0
    assert main(args + ["--strict"]) == 3
    out = capsys.readouterr().out
    assert "skipped" in out


def test_reports_byte_stable_and_job_independent(capsys):
    base = ["verify", "all", "--max-n", "1", "--json", "--no-timings"]
    main(base)
    a = capsys.readouterr().out
    main(base)
    b = capsys.readouterr().out
    main(base + ["--jobs", "2"])
    c = capsys.readouterr().out
    assert a == b == c
    main(["verify", "all", "--max-n", "1", "--json"])
    d = json.loads(capsys.readouterr().out)
    assert d["digest"] == json.loads(a)["digest"]


def test_seed_precheck_is_advisory(capsys):
    code, rep = run_json(capsys, "report", "--family", "sympl-minus", "--n", "1", "--seed", "3")
    assert code == 0
    assert rep["advisory"]["fuzz_precheck"][0]["agree"] is True


def test_out_path(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert main(["verify", "rowen", "--n", "1", "--json", "--out", str(path)]) == 0
    assert json.loads(path.read_text())["overall"] == "holds"


def test_env_budget_default(monkeypatch, capsys):
    monkeypatch.setenv(ENV_BUDGET_ENTRIES, "50")
    args = ["verify", "all", "--family", "sympl-plus", "--n", "2", "--strict"]
    assert main(args) == 3
    monkeypatch.setenv(ENV_BUDGET_ENTRIES, "nope")
    assert main(args) == 2
    capsys.readouterr()


def test_verify_all_suite(capsys):
    code, rep = run_json(capsys, "verify", "all", "--max-n", "2")
    assert code == 0 and rep["overall"] == "holds" and not rep["skipped"]
    fams = {c["family"] for c in rep["checks"]}
    assert {"sympl_plus(2)", "sympl_minus(2)", "orth_plus(5)", "orth_minus(5)", "full(2)"} <= fams


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "skewform.cli", "verify", "rowen", "--n", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "overall: holds" in out.stdout
