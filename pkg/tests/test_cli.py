import json
import pickle
import subprocess
import sys

import pytest

from cosmashkit.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def call_json(capsys, *argv):
    code, out, _ = call(capsys, *argv, "--json")
    return code, json.loads(out)


def test_gen_eqs_check(capsys):
    code, data = call_json(capsys, "gen-eqs", "--check-appendix")
    assert code == 0
    assert (data["equations"], data["matched"], data["missing"], data["extra"]) == (96, 96, [], [])


def test_gen_eqs_text(capsys):
    code, out, _ = call(capsys, "gen-eqs")
    assert code == 0 and "96 equations in 16 blocks (8 of 4, 8 of 8)" in out


def test_gcd_check(capsys):
    code, data = call_json(capsys, "gcd-check")
    assert code == 0 and data["gcd"] == 2 and data["roundtrip"]


def test_eval_assignment(capsys):
    code, data = call_json(capsys, "eval-assignment", "--assign", "ca")
    assert code == 1
    assert [1, "1"] in data["violated"]


def test_eval_assignment_json_object(capsys):
    zero = json.dumps({f"{l}{i}": 0 for l in "abcd" for i in range(1, 5)})
    code, data = call_json(capsys, "eval-assignment", "--assign", zero)
    assert [4, "-1"] in data["violated"]


def test_toy_certificates(capsys):
    code, out, _ = call(capsys, "certificate", "--toy")
    assert code == 0 and out.count(": ok") >= 3


def test_certificate_file(capsys, tmp_path):
    mu = tmp_path / "mu.json"
    mu.write_text(json.dumps(["0"] * 96))
    code, out, _ = call(capsys, "certificate", "--mu", str(mu), "--expect", "0")
    assert code == 0 and "verified" in out
    code, out, _ = call(capsys, "certificate", "--mu", str(mu), "--expect", "1")
    assert code == 1


def test_certificate_budget_saves_state(capsys, tmp_path):
    out_file = tmp_path / "cert.json"
    code, out, _ = call(capsys, "certificate", "--budget", "0.5", "--out", str(out_file))
    assert code == 1 and "budget exceeded" in out
    state = tmp_path / "cert.json.state"
    assert state.exists()
    before = pickle.loads(state.read_bytes()).pairs_processed
    # a second slice picks up from the saved state and saves again
    code, out, _ = call(capsys, "certificate", "--budget", "0.5", "--resume", str(state), "--out", str(out_file))
    assert code == 1 and "budget exceeded" in out
    assert pickle.loads(state.read_bytes()).pairs_processed > before


def test_groebner_input_file(capsys, tmp_path):
    f = tmp_path / "sys.txt"
    f.write_text("x*y - 1\nx\n")
    code, out, _ = call(capsys, "inconsistency", "--input", str(f))
    assert code == 0 and "reduced basis = {1}" in out


def test_variety_verbs(capsys):
    assert call(capsys, "variety", "check-identity", "--variety", "Anti", "(xy)(zt)")[0] == 0
    assert call(capsys, "variety", "check-identity", "--variety", "Mag", "xy - yx")[0] == 1
    code, data = call_json(capsys, "variety", "classify", "--variety", "CA")
    assert data["classification"] == "commutative"
    code, out, _ = call(capsys, "variety", "lambda-solve", "--variety", "Lie")
    assert "Empty" in out
    code, out, _ = call(capsys, "variety", "multilinearise", "xx")
    assert code == 0 and set(out.split()) == {"zy", "+", "yz"}


def test_custom_identities(capsys):
    code, _, _ = call(capsys, "variety", "check-identity", "--variety", "ids:xy - yx", "(ab)c - c(ab)")
    assert code == 0


def test_cosmash_report_phi(capsys):
    code, data = call_json(capsys, "cosmash", "report", "--variety", "Mag", "--factors", "a;b;c", "--map", "phi")
    assert data["degrees"]["3"]["injective"] and not data["degrees"]["3"]["surjective"]


def test_cosmash_independence(capsys):
    code, out, _ = call(capsys, "cosmash", "independence", "--variety", "Mag", "--factors", "a;b;c",
                        "--monomials", "(ab)c,(ba)c,c(ab),c(ba)")
    assert code == 0 and out.strip() == "independent"


def test_ca_checks(capsys):
    code, out, _ = call(capsys, "ca", "tensor-check", "--random", "3", "--seed", "4")
    assert code == 0 and out.count("ok") == 3
    code, out, _ = call(capsys, "ca", "closure-check", "--kind", "bool", "--field", "fp:2", "--identity", "x - xx")
    assert code == 0 and out.count("closed") == 3


def test_higgins(capsys, tmp_path):
    alg = tmp_path / "a.json"
    alg.write_text(json.dumps({"dimension": 3, "basis": ["e1", "e2", "e3"], "field": "q",
                               "constants": [[0, 1, 2, "1"], [1, 0, 2, "1"]]}))
    code, data = call_json(capsys, "higgins", "--algebra", str(alg), "--K", "[[1,0,0]]", "--L", "[[0,1,0]]")
    assert code == 0 and data["dimension"] == 1 and data["exact"]


@pytest.mark.parametrize("argv", [
    ["gen-eqs", "--bogus"],
    ["variety", "classify", "--variety", "NoSuch"],
    ["variety", "check-identity", "--variety", "CA", "xy -"],
    ["variety", "classify", "--variety", "CA", "--field", "fp:4"],
    ["certificate", "--mu", "x.json"],
])
def test_usage_errors(capsys, argv):
    assert run(argv) == 2


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "cosmashkit.cli", "gcd-check"], capture_output=True, text=True)
    assert r.returncode == 0 and "2" in r.stdout
