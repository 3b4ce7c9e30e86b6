"""Command-line interface: exit codes, reports, claims and determinism."""

import json
import subprocess
import sys

import pytest

from hallplanes.cli import main


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_plane_build(capsys):
    code, rep = run_json(capsys, "plane", "build")
    assert code == 0
    assert rep["result"]["counts"]["points"] == 91
    assert rep["result"]["counts"]["bf_lines"] + rep["result"]["counts"]["nbf_lines"] == 90
    assert set(rep) >= {"tool", "version", "plane", "command", "options", "result", "claims", "failed",
                        "exit_code", "timing"}


def test_plane_export(tmp_path, capsys):
    out = tmp_path / "pg.txt"
    code, rep = run_json(capsys, "plane", "export", "--out", str(out))
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0].split() == ["91", "91"]
    assert len(rows) == 92
    assert all(len(r.split()) == 10 for r in rows[1:])


def test_export_without_out_is_usage_error(capsys):
    assert main(["plane", "export"]) == 2
    assert "needs --out" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["plane", "build", "--p", "4"],
    ["plane", "build", "--p", "1"],
    ["plane", "build", "--r", "0"],
    ["plane", "build", "--r", "0", "--s", "1"],
    ["question", "nonsense"],
    ["sweep", "no-such-case"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_question_reproduces_claims(capsys):
    code, rep = run_json(capsys, "question", "3p1")
    assert code == 0
    ids = {c["id"]: c["status"] for c in rep["claims"]}
    assert ids["3p1-affirmed-hall"] == "reproduced"
    assert rep["result"]["summary"]["affine"]["affirmed"] is True
    assert rep["result"]["witness_replay"] is True


def test_wrong_expectation_exits_one(tmp_path, capsys):
    manifest = {"version": 1, "claims": [{
        "id": "wrong", "statement": "3+1 fails at order 9",
        "command": "question", "target": "3p1", "kind": "hall", "q": [3],
        "mode": "nondegenerate", "points": "affine", "groups": ["affine"],
        "expect": {"affirmed": False},
    }]}
    path = tmp_path / "claims.json"
    path.write_text(json.dumps(manifest))
    code = main(["question", "3p1", "--claims", str(path)])
    captured = capsys.readouterr()
    assert code == 1
    rep = json.loads(captured.out)
    assert rep["failed"] == ["wrong"] and rep["exit_code"] == 1
    assert "claim wrong failed" in captured.err


def test_report_is_deterministic_apart_from_timing(capsys):
    argv = ["question", "3p3", "--pairs", "canonical+infinity", "--jobs", "2"]
    _, a = run_json(capsys, *argv)
    _, b = run_json(capsys, *argv)
    a.pop("timing"), b.pop("timing")
    assert a == b


def test_backends_agree(capsys):
    _, a = run_json(capsys, "question", "3p2", "--backend", "python")
    _, b = run_json(capsys, "question", "3p2", "--backend", "auto")
    assert a["result"]["summary"] == b["result"]["summary"]
    assert a["result"]["verdicts"] == b["result"]["verdicts"]


def test_text_format_and_out(tmp_path, capsys):
    out = tmp_path / "report.txt"
    assert main(["suite", "axioms", "--format", "text", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    text = out.read_text()
    assert "exit_code" in text and "{" not in text.splitlines()[0]


def test_suite_and_witness(capsys):
    code, rep = run_json(capsys, "suite", "groups")
    assert code == 0 and rep["result"]["ok"] is True
    code, rep = run_json(capsys, "witness", "non-pappus")
    assert code == 0 and rep["result"]["found"] is True
    code, rep = run_json(capsys, "witness", "non-pappus", "--oracle")
    assert code == 0 and rep["result"]["found"] is False
    code, rep = run_json(capsys, "witness", "desargues")
    assert code == 0 and rep["result"]["found"] is True


def test_sweep_reports_coverage(capsys):
    code, rep = run_json(capsys, "sweep", "bf-nbf", "--p", "5")
    assert code == 0
    assert rep["result"]["ok"] is True


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hallplanes", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "hallplanes" in proc.stdout
