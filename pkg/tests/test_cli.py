import subprocess
import sys
from pathlib import Path

import pytest

from riesz_psi.cli import fmt, main

DATA = Path(__file__).resolve().parents[1] / "src" / "riesz_psi" / "data" / "zeros_10k.txt"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(out):
    return [line for line in out.splitlines() if not line.startswith("#")]


def manifest(out):
    return [line for line in out.splitlines() if line.startswith("#")]


@pytest.fixture
def toy(tmp_path):
    p = tmp_path / "toy.txt"
    p.write_text("# three zeros\n14.134725141734\n21.022039638771\n25.010857580145\n")
    return p


def test_fmt_round_trip():
    for v in (0.1, 1 / 3, 1e-300, 2.5e17, -7.25):
        assert float(fmt(v)) == v
    assert fmt(4.0) == "4" and fmt(0.0) == "0" and fmt(True) == "1"


def test_riesz_row(capsys):
    code, out, _ = run(capsys, "riesz", "--k", "1", "--x", "4")
    assert code == 0
    assert body(out) == ["x,S_k_exact_num,S_k_exact_den,S_k_float", "4,61,48,1.2708333333333333"]
    assert any(m.startswith("# command: riesz") for m in manifest(out))


def test_riesz_zero_row(capsys):
    code, out, _ = run(capsys, "riesz", "--k", "1", "--x", "1")
    assert body(out)[1] == "1,0,1,0"


def test_riesz_grid_and_limits(capsys):
    code, out, _ = run(capsys, "riesz", "--k", "0", "--x-max", "5", "--step", "1/2")
    assert code == 0 and len(body(out)) == 1 + 9
    code, _, err = run(capsys, "riesz", "--k", "0", "--x", "500", "--table-limit", "100")
    assert code == 3 and "500" in err


def test_missing_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["riesz", "--x", "4"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_verify_lemma1(capsys):
    code, out, _ = run(capsys, "verify-lemma1", "--s", "3", "--n", "1", "--n", "3", "--N", "100000", "--P", "100000")
    assert code == 0
    rows = [r.split(",") for r in body(out)[1:]]
    assert [r[-1] for r in rows] == ["1", "1"]
    # same F value for n=1 and n=3 within the printed bounds
    f1, f3 = float(rows[0][5]), float(rows[1][5])
    assert abs(f1 - f3) <= float(rows[0][7]) + float(rows[1][7])


def test_verify_lemma1_fail_and_domain(capsys):
    code, *_ = run(capsys, "verify-lemma1", "--s", "1.5+20i", "--n", "1", "--N", "1000", "--P", "1000",
                   "--tolerance", "1e-12")
    assert code in (1, 3)  # the bound cannot reach 1e-12 with these sizes
    code, _, err = run(capsys, "verify-lemma1", "--s", "0.5", "--n", "1")
    assert code == 2 and "Re s > 1" in err


def test_explicit_toy(capsys, toy):
    code, out, _ = run(capsys, "explicit", "--k", "2", "--x", "100", "--zeros", str(toy), "--max-zeros", "3")
    assert code == 0
    head, row = body(out)
    assert head == "x,S_k,main,E_k,Y,x^-1/2*Y,discrepancy,T_used,zero_count"
    cells = row.split(",")
    assert len(cells) == 9 and cells[0] == "100" and cells[-1] == "3"
    assert float(cells[4]) != 0
    assert any("x^4" in m for m in manifest(out))


def test_explicit_no_zeros(capsys, toy):
    code, out, _ = run(capsys, "explicit", "--k", "2", "--x", "100", "--x", "1000", "--zeros", str(toy),
                       "--max-zeros", "0")
    assert code == 0
    for row in body(out)[1:]:
        assert row.split(",")[4] == "0"


def test_explicit_corrupt_file(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("14.134725141734\n21.022039638771\n20.000000000000\n")
    code, _, err = run(capsys, "explicit", "--k", "2", "--x", "100", "--zeros", str(p))
    assert code == 4 and ":3:" in err


def test_env_var_for_zeros(capsys, toy, monkeypatch):
    monkeypatch.setenv("RIESZ_PSI_ZEROS", str(toy))
    code, out, _ = run(capsys, "explicit", "--k", "2", "--x", "100")
    assert code == 0 and body(out)[1].split(",")[-1] == "3"


def test_jlambda_examples(capsys):
    code, out, _ = run(capsys, "jlambda", "--lambda", "0.5", "--T", "10")
    assert code == 0 and body(out)[1] == "10,0,0"
    code, out, _ = run(capsys, "jlambda", "--lambda", "0", "--T", "100")
    assert body(out)[1] == "100,29,29"
    code, out, _ = run(capsys, "jlambda", "--lambda", "0.5", "--T-max", "2000", "--T-step", "100")
    J = [float(r.split(",")[1]) for r in body(out)[1:]]
    assert len(J) == 20 and all(b >= a for a, b in zip(J, J[1:]))
    code, _, err = run(capsys, "jlambda", "--lambda", "0.5", "--T", "1e5")
    assert code == 3 and "coverage" in err


def test_exponent_fit_command(capsys):
    code, out, _ = run(capsys, "exponent-fit", "--k", "2", "--x-min", "100", "--x-max", "10000", "--points", "12")
    assert code == 0
    assert body(out)[0].startswith("k,slope")
    code, *_ = run(capsys, "exponent-fit", "--k", "2", "--x-min", "100", "--x-max", "500")
    assert code == 3


def test_growth_and_tail_commands(capsys):
    code, out, _ = run(capsys, "h-growth", "--delta", "0.3333333", "--t", "0", "--t", "10", "--P", "10000")
    assert code == 0 and len(body(out)) == 3
    code, out, err = run(capsys, "tail-diagnostic", "--count", "2000", "--step", "50")
    assert code == 0 and "ratio" in err


def test_output_file(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["riesz", "--k", "2", "--x-max", "30", "-o", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert out.read_text().splitlines()[-1].startswith("30,")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "riesz_psi", "riesz", "--k", "1", "--x", "4"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.splitlines()[-1] == "4,61,48,1.2708333333333333"
