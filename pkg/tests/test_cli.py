import csv
import io
import json
import subprocess
import sys

import pytest

from polarlab.cli import main
from polarlab.kernel import Kernel, partial_distances


def run(capsys, *argv):
    code = main(["-q", *argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_analyze_fixture(capsys):
    code, out, _ = run(capsys, "analyze", "fixture:g2")
    assert code == 0
    d = json.loads(out)
    assert d["polarizing"] is True
    assert d["exponent"] == pytest.approx(0.5)


def test_analyze_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("10\n11\n"))
    code, out, _ = run(capsys, "analyze", "-")
    assert code == 0 and json.loads(out)["partial_distances"] == [1, 2]


def test_bad_inputs_exit_2(capsys, tmp_path):
    assert run(capsys, "analyze", "fixture:nope")[0] == 2
    assert run(capsys, "analyze", str(tmp_path / "missing.txt"))[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("11\n11\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and "error" in err
    assert run(capsys, "bounds", "--ell", "5-2")[0] == 2
    assert run(capsys, "search", "--ell", "3", "--profile", "1,1")[0] == 2
    assert run(capsys, "bch", "--m", "9")[0] == 2


def test_bounds_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--ell", "2-6")
    r = rows(out)
    assert code == 0
    assert r[0] == ["ell", "gv_lower", "naive_upper", "improved_upper"]
    assert [int(x[0]) for x in r[1:]] == [2, 3, 4, 5, 6]
    assert float(r[1][3]) == pytest.approx(0.5)


def test_profiles_csv(capsys):
    code, out, _ = run(capsys, "profiles", "--ell", "11-12", "--threshold", "0.5")
    r = rows(out)
    assert code == 0 and r[0] == ["ell", "exponent", "profile"]
    assert sum(1 for x in r[1:] if x[0] == "11") == 3
    assert sum(1 for x in r[1:] if x[0] == "12") == 10


def test_bch_kernel_and_shorten(capsys, tmp_path):
    code, out, _ = run(capsys, "bch", "--m", "3")
    k = Kernel.from_text(out)
    assert code == 0 and k.ell == 7
    code, out, _ = run(capsys, "bch", "--m", "4", "--shorten-to", "13", "--out-dir", str(tmp_path))
    r = rows(out)
    assert r[0] == ["ell", "exponent", "partial_distances", "candidates"]
    assert [int(x[0]) for x in r[1:]] == [15, 14, 13]
    k13 = Kernel.from_file(tmp_path / "kernel_13.txt")
    assert str(partial_distances(k13)) == r[-1][2]


def test_shorten_fixture(capsys):
    code, out, _ = run(capsys, "shorten", "fixture:kernel16", "--to", "14")
    assert code == 0 and [int(x[0]) for x in rows(out)[1:]] == [16, 15, 14]


def test_search_verdicts(capsys):
    code, out, _ = run(capsys, "search", "--ell", "3", "--profile", "1,1,3")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "verdict found"
    assert Kernel.from_text("\n".join(lines[2:])).ell == 3
    code, out, _ = run(capsys, "search", "--ell", "2", "--profile", "2,2")
    assert code == 0 and out.startswith("verdict nonexistent")
    code, out, _ = run(capsys, "search", "--ell", "16", "--budget", "3",
                       "--profile", "1,2,2,2,2,4,4,4,4,5,6,8,8,8,8,16")
    assert code == 3 and out.startswith("verdict indeterminate")


def test_polarize_csv_and_files(capsys, tmp_path):
    info = tmp_path / "info.csv"
    hist = tmp_path / "hist.csv"
    code, out, _ = run(capsys, "polarize", "fixture:g2", "--levels", "6", "--beta", "0.3",
                       "--rate", "0.5", "--paths", "200", "--info-set", str(info),
                       "--histogram", str(hist))
    r = rows(out)
    assert code == 0
    assert r[0] == ["level", "mean_z", "conservation_residual", "unpolarized_frac",
                    "frac_beta_0.3", "mc_frac_beta_0.3", "pe_lower", "pe_upper"]
    assert len(r) == 8 and all(float(x[1]) == pytest.approx(0.5) for x in r[1:])
    assert len(rows(info.read_text())) == 33
    assert rows(hist.read_text())[0] == ["level", "log2z_lo", "log2z_hi", "count"]


def test_seed_reproducible(capsys):
    argv = ["polarize", "fixture:example1_f", "--levels", "5", "--beta", "0.2", "--paths", "300"]
    a = run(capsys, *argv, "--seed", "5")[1]
    b = run(capsys, *argv, "--seed", "5")[1]
    assert a == b


def test_options_after_subcommand(capsys, tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bounds", "--ell", "3", "-q", "-o", str(out), "--threads", "1"]) == 0
    assert rows(out.read_text())[0][0] == "ell"


def test_console_entry_point():
    p = subprocess.run([sys.executable, "-m", "polarlab.cli", "-q", "analyze", "fixture:example1_f"],
                       capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads(p.stdout)["ell"] == 3
