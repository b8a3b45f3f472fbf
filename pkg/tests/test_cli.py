import json
import subprocess
import sys

import pytest

from divorder import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval(capsys):
    assert run(capsys, "eval", "tau_r", "--n", "12", "--r", "1")[1] == "2\n"
    assert run(capsys, "eval", "sigma_r", "--n", "12", "--r", "0")[1] == "20\n"
    assert run(capsys, "eval", "mu_k", "--n", "36", "--k", "2")[1] == "1\n"
    code, out, _ = run(capsys, "eval", "tau_ab", "--n", "4", "--a", "1", "--b", "2", "--format", "json")
    assert code == 0 and json.loads(out)["rows"] == [{"n": 4, "value": 2}]


def test_constants_json(capsys):
    code, out, _ = run(capsys, "constants", "--r", "1")
    assert code == 0
    doc = json.loads(out)
    vals = {row["name"]: row["value"] for row in doc["rows"]}
    assert float(vals["A_r"]) == pytest.approx(1.519817, abs=1e-6)
    assert float(vals["B_r"]) == pytest.approx(-0.887789, abs=1e-6)
    assert doc["meta"]["r"] == 1


def test_exppair(capsys):
    code, out, _ = run(capsys, "exppair", "eval", "AH")
    assert code == 0
    assert out.splitlines()[1] == "AH,16/237,743/948,0.067510548523,0.783755274262,true,true"
    code, out, _ = run(capsys, "exppair", "table")
    assert len(out.splitlines()) == 15


def test_bad_arguments_exit_2(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "eval", "tau_r")[0] == 2
    assert run(capsys, "exppair", "eval", "A2H")[0] == 2
    assert run(capsys, "sum", "tau_r", "--limit", "0")[0] == 2
    assert run(capsys, "sum", "tau_r", "--threads", "0")[0] == 2
    code, _, err = run(capsys, "eval", "tau_r", "--n", "0")
    assert code == 2 and "usage" in err


def test_sum_and_divisors(capsys):
    assert run(capsys, "sum", "tau_r", "--r", "1", "--limit", "10", "--x", "10")[1] == "x,sum\n10,13\n"
    assert run(capsys, "divisors", "--n", "12", "--r", "0")[1] == "divisor\n1\n3\n4\n12\n"


def test_mertens(capsys):
    code, out, _ = run(capsys, "mertens", "--k", "2", "--x", "16")
    assert out == "x,M_k\n16,-1\n"
    code, out, _ = run(capsys, "mertens", "--k", "3", "--limit", "10000")
    assert out.splitlines()[-1] == "10000,-2"  # M(21) = -2


def test_residual_and_petermann(capsys, tmp_path):
    path = tmp_path / "res.json"
    code, _, _ = run(capsys, "residual", "tau_r", "--r", "1", "--limit", "100000", "--fit-from", "10", "--format", "json", "-o", str(path))
    doc = json.loads(path.read_text())
    assert code == 0 and doc["meta"]["flagged"] == 0 and 0 < doc["meta"]["slope"] < 1
    assert set(doc["rows"][0]) == {"x", "sum", "main", "residual", "budget_ok"}
    code, out, _ = run(capsys, "petermann", "--x", "10")
    assert out.splitlines()[1].startswith("10,64,60.10")


def test_distribution_and_champions(capsys):
    code, out, _ = run(capsys, "distribution", "--N", "10000", "--points", "5", "--format", "json")
    doc = json.loads(out)
    assert len(doc["rows"]) == 5 and doc["meta"]["atom_at_zero"] > 0.5
    code, out, _ = run(capsys, "champions", "--kind", "sigma_limsup", "--y", "1000")
    assert out.startswith("y,value,limit\n1000,")


def test_threads_give_identical_bytes(capsys):
    args = ["sum", "sigma_r", "--r", "1", "--limit", "300000", "--segment", "65536"]
    one = run(capsys, *args, "--threads", "1")[1]
    many = run(capsys, *args, "--threads", "3")[1]
    assert one == many


def test_locale_independent_output(capsys):
    _, out, _ = run(capsys, "sum", "sigma_r", "--r", "1", "--limit", "10000000", "--x", "10000000")
    value = out.splitlines()[1].split(",")[1]
    assert value.isdigit()  # no grouping separators
    _, out, _ = run(capsys, "petermann", "--x", "1000")
    assert "." in out.splitlines()[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "divorder", "eval", "tau_r", "--n", "8", "--r", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "2\n"


@pytest.mark.slow
def test_selftest_exit_code(capsys):
    code, out, err = run(capsys, "selftest")
    assert code == 0
    assert err.count("[PASS]") == 12
    assert out.startswith("criterion,name,passed,detail,seconds\n")
