import subprocess
import sys
from pathlib import Path

import pytest

from selfsim.cli import main
from selfsim.mealy import act, load_group

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_act_matches_library(capsys):
    code, out, _ = run(capsys, "act", "--group", "grig.ssg", "--element", "ab", "--word", "01101")
    G = load_group("grigorchuk")
    expected = act(G.element("ab"), [0, 1, 1, 0, 1])
    assert code == 0
    assert out.strip() == "".join(map(str, expected))


def test_group_file_path(capsys, tmp_path):
    f = tmp_path / "z.ssg"
    f.write_text("p = 3\nt = s\n", encoding="utf-8")
    code, out, _ = run(capsys, "act", "--group", str(f), "--element", "t't't'", "--word", "012")
    assert (code, out) == (0, "012\n")


def test_diagonal_check_long(capsys):
    code, out, _ = run(capsys, "diagonal", "--group", "grig.ssg", "--element", "b", "--length", "1024", "--check")
    assert code == 0
    vals = [int(x) for x in out.split()]
    assert len(vals) == 1024 and vals[:8] == [0, 1, 0, 1, 0, 1, 0, 0]


def test_diagonal_other_index(capsys):
    code, out, _ = run(capsys, "diagonal", "--group", "adding", "--element", "a", "--index", "0",
                       "--length", "32", "--check")
    assert code == 0 and out.split() == ["1"] * 32


def test_render_golden(capsys, tmp_path):
    dest = tmp_path / "b.pbm"
    code, _, _ = run(capsys, "render", "--group", "grig.ssg", "--element", "b", "--level", "9",
                     "--basis", "binomial", "--out", str(dest))
    assert code == 0
    text = dest.read_text()
    assert text.startswith("P1\n512 512\n")
    assert text == (DATA / "grigorchuk_b_512.pbm").read_text()


def test_matrix_formats_and_check(capsys):
    code, out, _ = run(capsys, "matrix", "--group", "grig", "--element", "a", "--level", "2", "--check")
    assert code == 0 and out == "1 1 0 0\n0 1 0 0\n0 0 1 1\n0 0 0 1\n"
    code, out, _ = run(capsys, "matrix", "--group", "grig", "--element", "a", "--level", "1",
                       "--basis", "delta", "--format", "csv")
    assert out == "0,1\n1,0\n"
    code, out, _ = run(capsys, "matrix", "--group", "gupta_sidki", "--element", "a", "--level", "1", "--format", "pgm")
    assert code == 0 and out.startswith("P2\n3 3\n2\n")


def test_entry(capsys):
    code, out, _ = run(capsys, "entry", "--group", "grig", "--element", "b", "--row", "3", "--col", "4", "--check")
    assert (code, out) == (0, "1\n")


def test_alpha_and_tableau(capsys):
    code, out, _ = run(capsys, "alpha", "--group", "grig", "--element", "c", "--terms", "6")
    assert code == 0
    assert out.splitlines() == ["pre=[0] period=[1, 0, 1]", "0 1 0 1 1 0"]
    code, out, _ = run(capsys, "tableau", "--group", "adding", "--element", "a", "--level", "3")
    assert out.splitlines() == ["f0 = 1", "f1 = x1", "f2 = x1*x2"]


def test_height(capsys):
    code, out, _ = run(capsys, "height", "--p", "2", "--values", "01101001", "--check")
    assert (code, out) == (0, "4\n")
    code, out, _ = run(capsys, "height", "--p", "3", "--values", "000000000", "--method", "T")
    assert out == "-1\n"
    code, _, err = run(capsys, "height", "--p", "2", "--values", "011")
    assert code == 1 and "p^n" in err


def test_uniserial(capsys):
    code, out, _ = run(capsys, "uniserial", "--group", "grig", "--check")
    assert code == 0 and out.splitlines()[0] == "true"
    code, out, _ = run(capsys, "uniserial", "--group", "gupta_sidki", "--check", "--depth", "2")
    assert code == 0 and out.splitlines()[0] == "false"


def test_kernel_and_term(capsys):
    code, out, _ = run(capsys, "kernel", "--sequence", "thue-morse", "--check")
    assert code == 0 and out.splitlines()[0] == "symbols 2"
    code, out, _ = run(capsys, "kernel", "--group", "grig", "--element", "d", "--check", "--verify", "256")
    assert code == 0
    code, out, _ = run(capsys, "term", "--sequence", "thue-morse", "--n", "0", "--count", "16", "--check")
    assert "".join(out.split()) == "0110100110010110"
    code, out, _ = run(capsys, "term", "--group", "adding", "--element", "a", "--index", "1", "--n", "1", "--count", "4")
    assert out.split() == ["1", "1", "1", "1"]


def test_kernel_check_detects_bad_prefix(capsys):
    # a one-term prefix merges the b-diagonal with unrelated sequences
    code, _, err = run(capsys, "kernel", "--group", "grig", "--element", "b", "--prefix", "1", "--check")
    assert code == 1 and "mispredicts" in err


def test_series_verify(capsys):
    for rel in "BCD":
        code, out, _ = run(capsys, "series-verify", "--group", "grig", "--relation", rel, "--order", "56", "--check")
        assert (code, out) == (0, "holds mod s^56\n")
    code, out, err = run(capsys, "series-verify", "--group", "grig", "--relation", "B", "--element", "c")
    assert code == 1 and "fails" in out


def test_domain_errors_exit_1(capsys):
    code, _, err = run(capsys, "act", "--group", "nope", "--element", "a", "--word", "0")
    assert code == 1 and err.startswith("error:")
    code, _, err = run(capsys, "act", "--group", "grig", "--element", "a", "--word", "012")
    assert code == 1
    code, _, err = run(capsys, "matrix", "--group", "grig", "--element", "a", "--level", "40")
    assert code == 1
    code, _, err = run(capsys, "alpha", "--group", "adding3", "--element", "a'", "--terms", "2")
    assert code == 0


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["matrix", "--group", "grig", "--element", "a"])
    assert e.value.code == 2
    code, _, err = run(capsys, "act", "--word", "0")
    assert code == 2 and "--group" in err


def test_subprocess_deterministic(tmp_path):
    cmd = [sys.executable, "-m", "selfsim", "matrix", "--group", "grig", "--element", "(ad)^2",
           "--level", "4", "--format", "csv"]
    outs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]
    bad = subprocess.run([sys.executable, "-m", "selfsim", "nope"], capture_output=True)
    assert bad.returncode == 2
