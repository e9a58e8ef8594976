import json
import subprocess
import sys

import pytest

from subcubic_packing.cli import ENV_DEFAULTS, ENV_PREFIX, run_cli
from subcubic_packing.families import build_H
from subcubic_packing.formats import decode_graph6, parse_dimacs
from subcubic_packing.report import ReportError, load_certificate, load_report, validate_report


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report_of(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, load_report(out), err


def test_build_formats(capsys, tmp_path):
    code, out, _ = run(capsys, "build", "--family", "h", "--format", "graph6")
    assert code == 0 and decode_graph6(out.strip()) == build_H().graph
    code, out, _ = run(capsys, "build", "--family", "gk", "--k", "1", "--format", "dimacs")
    assert code == 0 and parse_dimacs(out).n == 75
    target = tmp_path / "g0.g6"
    code, _, _ = run(capsys, "build", "--family", "g0", "--format", "graph6", "--out", str(target))
    assert code == 0
    labels = json.loads((tmp_path / "g0.g6.labels.json").read_text())
    assert labels["family"] == "G0" and labels["labels"][-1] == "x"
    assert decode_graph6(target.read_text().strip()).n == 35
    code, rep, _ = report_of(capsys, "build", "--family", "tree", "--depth", "2")
    assert code == 0 and rep["results"]["graph"]["value"]["n"] == 7


def test_analyze_report(capsys, tmp_path):
    code, rep, _ = report_of(capsys, "analyze", "--family", "g0")
    assert code == 0
    res = rep["results"]
    assert res["diameter"] == {"value": 6, "provenance": "bfs"}
    assert res["degree_profile"]["value"] == {"2": 5, "3": 30}
    assert rep["unreachable_sentinel"] == 2**31 - 1
    path = tmp_path / "h.json"
    run(capsys, "build", "--family", "h", "--out", str(path))
    code, rep, _ = report_of(capsys, "analyze", "--in", str(path))
    assert code == 0 and rep["results"]["vertices"] == {"value": 15, "provenance": "input"}


def test_analyze_disconnected_input(capsys, tmp_path):
    path = tmp_path / "two.dimacs"
    path.write_text("p edge 3 1\ne 1 2\n")
    code, rep, _ = report_of(capsys, "analyze", "--in", str(path))
    assert code == 0
    assert rep["results"]["connected"]["value"] is False and "diameter" not in rep["results"]


def test_solve_exit_codes(capsys):
    code, rep, _ = report_of(capsys, "solve", "--family", "h", "--decide", "6")
    assert code == 1 and rep["results"]["status"]["value"] == "UNSAT" and rep["exit_code"] == 1
    code, rep, _ = report_of(capsys, "solve", "--family", "h", "--decide", "7")
    assert code == 0 and set(rep["results"]["witness"]["value"]) == {str(lab) for lab in build_H().labels}
    code, rep, _ = report_of(capsys, "solve", "--family", "h", "--exact")
    assert code == 0 and rep["results"]["chi_rho"]["value"] == 7
    code, rep, _ = report_of(capsys, "solve", "--family", "g0", "--decide", "8", "--node-limit", "100")
    assert code == 3 and rep["results"]["status"]["value"] == "TIMEOUT"
    code, rep, _ = report_of(capsys, "solve", "--family", "h", "--exact", "--node-limit", "3")
    assert code == 3


def test_solver_flags_reach_config(capsys):
    code, rep, _ = report_of(
        capsys, "solve", "--family", "h", "--decide", "6",
        "--no-capacity-rule", "--no-singleton-rule", "--no-forward-check", "--ordering", "power2-degree",
    )
    assert code == 1
    assert rep["inputs"]["config"] == {
        "time_limit": 300.0, "node_limit": 10**9, "ordering": "power2-degree",
        "forward_check": False, "singleton_rule": False, "capacity_rule": False,
    }


def test_environment_overrides(capsys, monkeypatch):
    monkeypatch.setenv(ENV_PREFIX + "NODE_LIMIT", "10")
    monkeypatch.setenv(ENV_PREFIX + "ORDERING", "power2-degree")
    code, rep, _ = report_of(capsys, "solve", "--family", "h", "--decide", "6")
    assert code == 3 and rep["inputs"]["config"]["ordering"] == "power2-degree"
    monkeypatch.setenv(ENV_PREFIX + "FORMAT", "graph6")
    code, out, _ = run(capsys, "build", "--family", "h")
    assert out.strip() == "Ni_XH?@?G@?G?BACa@?"
    monkeypatch.setenv(ENV_PREFIX + "K_MAX_DIAM", "0")
    code, _, err = run(capsys, "certify", "--k", "1")
    assert code == 2 and "refused" in err
    monkeypatch.setenv(ENV_PREFIX + "SEED", "4")
    _, a, _ = report_of(capsys, "analyze", "--family", "random", "--n", "12")
    _, b, _ = report_of(capsys, "analyze", "--family", "random", "--n", "12", "--seed", "4")
    assert a["inputs"]["seed"] == 4 and a["results"] == b["results"]
    assert set(ENV_DEFAULTS) == {"TIME_LIMIT", "NODE_LIMIT", "ORDERING", "K_MAX_DIAM", "SEED", "FORMAT"}


def test_packing_command(capsys):
    code, rep, _ = report_of(capsys, "packing", "--family", "h", "--i", "2", "--enumerate")
    assert code == 0
    assert rep["results"]["size"]["value"] == 5
    assert rep["results"]["maximum_sets"]["value"] == [["y1", "y7", "z3", "z5", "w"]]


@pytest.mark.parametrize("lemma", ["1", "2", "3", "4", "5"])
def test_verify_lemmas(capsys, lemma):
    code, rep, _ = report_of(capsys, "verify", "--lemma", lemma)
    assert code == 0 and rep["results"]["passed"]["value"] is True
    assert all(c["passed"] for c in rep["checks"])


def test_verify_theorem(capsys):
    code, rep, _ = report_of(capsys, "verify", "--theorem", "--k", "2")
    assert code == 0 and rep["results"]["conclusion"]["value"] == "chi_rho(G2) >= 13"
    code, _, err = run(capsys, "verify", "--theorem")
    assert code == 2
    code, rep, err = report_of(capsys, "verify", "--theorem", "--k", "3", "--k-max-diam", "2", "--trust-diameter")
    assert code == 0 and rep["results"]["trust_level"]["value"] == "paper-trusted-diameter"
    assert "WARNING" in err


def test_certify_and_check(capsys, tmp_path):
    out = tmp_path / "cert.json"
    fig = tmp_path / "chain.png"
    code, _, _ = run(capsys, "certify", "--k", "2", "--out", str(out), "--figure", str(fig))
    assert code == 0
    rep = load_report(out.read_text())
    assert rep["results"]["chi_rho_lower"] == {"value": 13, "provenance": "certificate"}
    assert rep["results"]["trust_level"]["value"] == "fully-machine-checked"
    assert rep["figures"] == [str(fig)] and fig.stat().st_size > 0
    code, rep2, _ = report_of(capsys, "certify", "--check", str(out))
    assert code == 0 and rep2["results"]["chi_rho_lower"]["value"] == 13
    # bare certificate documents are accepted as well
    bare = tmp_path / "bare.json"
    bare.write_text(json.dumps(rep["certificate"]))
    assert load_certificate(bare.read_text()).conclusion.value == 13
    # a tampered certificate is rejected with exit 1
    rep["certificate"]["steps"][-1]["claim"]["value"] = 14
    rep["certificate"]["conclusion"]["value"] = 14
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(rep))
    code, _, err = run(capsys, "certify", "--check", str(bad))
    assert code == 1 and "certificate check failed" in err


def test_certify_refusals(capsys):
    code, _, err = run(capsys, "certify", "--k", "40")
    assert code == 2 and "refused" in err
    code, _, err = run(capsys, "certify", "--k", "40", "--trust-diameter")
    assert code == 2
    code, rep, err = report_of(capsys, "certify", "--k", "2", "--k-max-diam", "1", "--trust-diameter")
    assert code == 0 and rep["results"]["chi_rho_lower"]["provenance"] == "paper-trusted"
    assert "WARNING" in err


def test_analyze_figure(capsys, tmp_path):
    fig = tmp_path / "sub" / "profile.png"
    code, rep, _ = report_of(capsys, "analyze", "--family", "gk", "--k", "1", "--figure", str(fig))
    assert code == 0 and fig.read_bytes()[:4] == b"\x89PNG"


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["build"],
        ["build", "--family", "gk"],
        ["build", "--family", "random"],
        ["solve", "--family", "h"],
        ["solve", "--family", "h", "--in", "x.g6", "--exact"],
        ["solve", "--in", "/nonexistent/graph.g6", "--exact"],
        ["packing", "--family", "h", "--i", "0"],
        ["verify", "--lemma", "6"],
        ["verify", "--lemma", "1", "--k", "2"],
        ["build", "--family", "gk", "--k", "15"],
        ["certify", "--check", "/nonexistent.json"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_bad_graph_file(capsys, tmp_path):
    path = tmp_path / "bad.g6"
    path.write_text("B\x7f\n")
    code, _, err = run(capsys, "analyze", "--in", str(path))
    assert code == 2 and "offset 1" in err


def test_reports_are_strict():
    with pytest.raises(ReportError):
        load_report("{}")
    with pytest.raises(ReportError):
        load_report("not json")
    good = {
        "schema_version": "1", "artifact_version": "0", "command": "build",
        "inputs": {}, "results": {}, "timing": {"seconds": 0.0},
    }
    validate_report(good)
    with pytest.raises(ReportError):
        validate_report({**good, "surprise": 1})
    with pytest.raises(ReportError):
        validate_report({**good, "results": {"x": {"value": 1, "provenance": "vibes"}}})


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "subcubic_packing", "build", "--family", "h", "--format", "graph6"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "Ni_XH?@?G@?G?BACa@?"
