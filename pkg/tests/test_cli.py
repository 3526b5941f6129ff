import io
import subprocess
import sys

import pytest

from minergy.cli import main, num


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "l2": "regular 2\n",
        "l3": "regular 3\n",
        "l4": "regular 4\n",
        "l9": "regular 9\n",
        "bad": "# descending\n2\n2 1\n1 1\n",
    }.items():
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_num_format():
    assert num(6.0) == "6"
    assert num(1 / 3) == "0.333333333333"
    assert num(float("nan")) == "nan"


class TestSolve:
    def test_monomial(self, files):
        code, text = run("solve", files["l3"], "--a", "2")
        assert code == 0
        lines = text.splitlines()
        assert lines[0] == "graph: T0"
        assert "energy: 6" in lines
        assert "certified: true" in lines
        assert lines[-4:] == ["sender,receiver,amount", "1,0,3", "2,1,2", "3,2,1"]

    def test_two_term(self, files):
        code, text = run("solve", files["l4"], "--a", "2", "--b", "0", "--lambda", "0.1")
        assert code == 0 and text.startswith("graph: T0\n")

    def test_gain(self, files):
        code, text = run("solve", files["l3"], "--gain", "mono:0.5")
        assert code == 0 and text.startswith("graph: T1\n")

    def test_uncertified_exit(self, files):
        code, text = run("solve", files["l4"], "--a", "2", "--b", "0", "--lambda", "3")
        assert code == 2
        assert "certified: false" in text

    def test_tie_listed(self, files):
        _, text = run("solve", files["l3"], "--a", "1")
        assert "tied: T1" in text

    def test_parse_error(self, files, capsys):
        code, _ = run("solve", files["bad"], "--a", "2")
        assert code == 1
        assert "line 4" in capsys.readouterr().err

    @pytest.mark.parametrize("flags", [
        [],
        ["--a", "2", "--b", "0"],
        ["--a", "2", "--b", "0", "--lambda", "-1"],
        ["--a", "2", "--gain", "mono:2"],
        ["--gain", "bogus"],
    ])
    def test_bad_flags(self, files, flags):
        assert run("solve", files["l3"], *flags)[0] == 1

    def test_negative_exponent_forms(self, files):
        code, text = run("solve", files["l4"], "--a", "-2.0e+00")
        assert code == 0 and text.startswith("graph: T2(1)\n")
        assert run("solve", files["l4"], "--a", "2", "--b", "-1e-05", "--lambda", "1")[0] == 0

    def test_missing_file(self, tmp_path):
        assert run("solve", str(tmp_path / "nope.txt"), "--a", "2")[0] == 1

    def test_usage_error_exit_code(self, files):
        with pytest.raises(SystemExit) as exc:
            run("solve", files["l3"], "--a", "two")
        assert exc.value.code == 1


class TestThresholds:
    def test_roots(self, files):
        code, text = run("thresholds", files["l3"])
        assert code == 0
        header, row = text.splitlines()
        assert header == "kind,k,value,residual,status"
        kind, k, value, residual, status = row.split(",")
        assert (kind, k, status) == ("a_k", "1", "ok")
        assert float(value) == pytest.approx(-0.7879, abs=1e-3)
        assert float(residual) < 1e-10

    def test_lambdas(self, files):
        _, text = run("thresholds", files["l4"], "--a", "2", "--b", "0")
        assert "lambda_0,0,2,0,ok" in text.splitlines()
        assert any(line.endswith("degenerate") for line in text.splitlines())

    def test_no_roots(self, files):
        assert run("thresholds", files["l2"])[1] == "kind,k,value,residual,status\n"

    def test_half_flags(self, files):
        assert run("thresholds", files["l4"], "--a", "2")[0] == 1


class TestSweep:
    def rows(self, text):
        return [line.split(",") for line in text.splitlines()[1:]]

    def test_exponent_switches(self, files):
        code, text = run("sweep", files["l3"], "--a-range", "-2", "2", "--step", "0.25")
        assert code == 0
        rows = self.rows(text)
        assert len(rows) == 17
        graph = {float(r[0]): r[1] for r in rows}
        assert graph[-2.0] == graph[-1.0] == "T2(1)"
        assert graph[-0.75] == graph[0.75] == "T1"
        assert graph[1.25] == graph[2.0] == "T0"

    def test_lambda_switch_near_two(self, files):
        _, text = run("sweep", files["l4"], "--lambda-range", "0", "4", "--step", "0.5",
                      "--a", "2", "--b", "0")
        rows = self.rows(text)
        assert [r[1] for r in rows[:5]] == ["T0"] * 5
        assert all(r[1] != "T0" for r in rows[5:])
        assert all(r[3] == "true" for r in rows[:5])

    def test_equal_exponents_constant(self, files):
        _, text = run("sweep", files["l4"], "--lambda-range", "0", "3", "--step", "1",
                      "--a", "0.5", "--b", "0.5")
        assert {r[1] for r in self.rows(text)} == {"T1"}

    @pytest.mark.parametrize("flags", [
        ["--a-range", "1", "0", "--step", "0.1"],
        ["--a-range", "0", "1", "--step", "0"],
        ["--lambda-range", "0", "1", "--step", "0.5"],
        ["--step", "0.5"],
    ])
    def test_bad_ranges(self, files, flags):
        assert run("sweep", files["l3"], *flags)[0] == 1

    def test_figure(self, files, tmp_path):
        fig = tmp_path / "out" / "sweep.png"
        code, _ = run("sweep", files["l3"], "--a-range", "-2", "2", "--step", "0.5",
                      "--figure", str(fig))
        assert code == 0
        assert fig.stat().st_size > 1000
        assert fig.read_bytes()[:4] == b"\x89PNG"


class TestOracle:
    def test_agrees(self, files):
        code, text = run("oracle", files["l3"], "--a", "2")
        assert code == 0
        assert text.splitlines()[0] == "oracle: 6"
        assert "verdict: agrees" in text

    def test_ties(self, files):
        _, text = run("oracle", files["l3"], "--a", "1")
        assert "argmin trees: 6" in text
        assert "  1->0 2->1 3->2" in text.splitlines()

    def test_too_large(self, files):
        assert run("oracle", files["l9"], "--a", "2")[0] == 3

    def test_cap_env(self, files, monkeypatch):
        monkeypatch.setenv("MINERGY_ORACLE_CAP", "3")
        assert run("oracle", files["l4"], "--a", "2")[0] == 3


class TestSinrSchedule:
    def test_two_sensors(self, files):
        code, text = run("sinr-schedule", files["l2"])
        assert code == 0
        assert text.splitlines()[-3:] == [
            "sender,receiver,start,end,rate,amount,slot_energy",
            "2,1,0,1,1,1,1",
            "1,0,1,3,1,2,2",
        ]
        assert "total_energy: 3" in text

    def test_bad_params(self, files):
        assert run("sinr-schedule", files["l2"], "--p0", "0")[0] == 1
        assert run("sinr-schedule", files["l2"], "--gain", "mono")[0] == 1

    def test_figure(self, files, tmp_path):
        fig = tmp_path / "sched.png"
        assert run("sinr-schedule", files["l4"], "--gain", "mono:0.5", "--figure", str(fig))[0] == 0
        assert fig.read_bytes()[:4] == b"\x89PNG"


def test_byte_stable_subprocess(files):
    cmd = [sys.executable, "-m", "minergy", "sweep", files["l4"], "--lambda-range", "0", "4",
           "--step", "0.5", "--a", "0", "--b", "-3"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first.startswith(b"lambda,graph,energy,certified\n")


def test_stdin(files, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("regular 3\n"))
    code, text = run("solve", "-", "--a", "2")
    assert code == 0 and text.startswith("graph: T0")
