import json

import pytest

from heckerank2 import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line.strip()], out


def test_cyclic_gram_3(capsys):
    code, lines, _ = run(capsys, "cyclic", "gram", "3")
    assert code == 0
    (r,) = lines
    assert r["determinant"] == "-1*a_s_0^2" and r["verdict"] == "PASS"


def test_reduce_c2_inverse(capsys):
    code, lines, _ = run(capsys, "reduce", "s1^-1", "--group", "C2")
    assert code == 0
    (r,) = lines
    assert r["coords"] == {"1": "1*u_s_1^-1 + 1*u_s_2^-1", "s": "-1*u_s_1^-1*u_s_2^-1"}


def test_negative_control_exit_code(capsys):
    code, lines, _ = run(capsys, "parabolic", "verify", "G8:tilde-r-s1")
    assert code == 1
    (r,) = lines
    assert r["basis"] == "PASS" and r["good"] == "FAIL" and r["as_expected"]


def test_parabolic_verify_pass(capsys):
    code, lines, _ = run(capsys, "parabolic", "verify", "G4:r-s1")
    assert code == 0 and lines[0]["verdict"] == "PASS"


def test_parabolic_verify_modular(capsys):
    code, lines, _ = run(capsys, "parabolic", "verify", "G8:r-s2", "--mode", "modular", "--trials", "3")
    assert code == 0 and lines[0]["mode"] == "modular"
    assert [w["trials"] for w in lines[0]["witnesses"]] == [3, 3, 3]


def test_basis_verify_file(capsys, tmp_path):
    f = tmp_path / "c3.txt"
    f.write_text("# powers of s\n1\ns\ns^2\n")
    code, lines, _ = run(capsys, "basis", "verify", str(f), "-g", "C3")
    assert code == 0 and lines[0]["verdict"] == "PASS" and lines[0]["candidate"] == "c3.txt"
    f.write_text("1\ns\ns\n")
    code, lines, _ = run(capsys, "basis", "verify", str(f), "-g", "C3")
    assert code == 1 and lines[0]["verdict"] == "FAIL"


def test_trace_commands(capsys):
    code, lines, _ = run(capsys, "trace", "crit", "s2", "-g", "G4")
    assert code == 0 and lines[0]["verdict"] == "PASS"
    code, lines, _ = run(capsys, "trace", "gram", "-g", "C4")
    assert code == 0 and lines[0]["symmetric"]


def test_list(capsys):
    code, lines, _ = run(capsys, "list")
    assert code == 0
    assert sum(1 for r in lines if r["kind"] == "catalog") == 29
    assert {r["name"] for r in lines if r["kind"] == "presentation"} >= {"G4", "G7", "G13"}


def test_er_build(capsys):
    code, lines, _ = run(capsys, "er", "build", "G7", "--walkthrough", "G7:r-s3")
    assert code == 0
    assert lines[-1]["size"] == 144 and lines[-1]["verdict"] == "PASS"


def test_errors_are_reported(capsys):
    code, lines, _ = run(capsys, "reduce", "s1", "-g", "G99")
    assert code == 2 and lines[0]["error"] == "PresentationError"
    code, lines, _ = run(capsys, "table", "-g", "G4", "--budget", "10")
    assert code == 2 and "budget" in lines[0]["message"]
    code, lines, _ = run(capsys, "trace", "crit", "-g", "G4")
    assert code == 2


def test_reports_are_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run(capsys, "parabolic", "verify", "G4:l-s2", "-o", str(a))
    run(capsys, "parabolic", "verify", "G4:l-s2", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert "seconds" not in a.read_text()


def test_cache_commands(capsys, tmp_cache):
    run(capsys, "table", "-g", "C3")
    code, lines, _ = run(capsys, "cache", "info")
    assert lines[0]["files"] == 1
    run(capsys, "cache", "clear")
    code, lines, _ = run(capsys, "cache", "info")
    assert lines[0]["files"] == 0


def test_cache_dir_flag(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("HECKERANK2_CACHE", raising=False)  # restored after the test
    code, lines, _ = run(capsys, "table", "-g", "C2", "--cache-dir", str(tmp_path))
    assert code == 0
    assert list(tmp_path.glob("table-*.json"))


def test_bad_subcommand():
    with pytest.raises(SystemExit):
        cli.main(["frobnicate"])
