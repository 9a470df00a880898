import json
import subprocess
import sys
from pathlib import Path

import pytest

from restricta import cli
from restricta import fourier as F

SRC = str(Path(__file__).resolve().parent.parent / "src")


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBasics:
    def test_help_exits_zero(self, capsys):
        code, _, _ = run_cli(capsys, "--help")
        assert code == 0

    def test_unknown_flag_exits_two(self, capsys):
        code, _, _ = run_cli(capsys, "fourier", "--nope")
        assert code == 2

    def test_missing_subcommand_exits_two(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 2

    def test_computation_error_exits_one(self, capsys):
        code, out, _ = run_cli(capsys, "dioph", "--psi", "constant:0",
                               "--cmd", "select-r", "--Q", "2", "--cap", "50")
        assert code == 1
        payload = json.loads(out)
        assert payload["error"] == "not-reached"

    def test_malformed_sys_spec(self, capsys):
        code, out, _ = run_cli(capsys, "census", "--sys", "q=10", "--x", "50")
        assert code == 2
        assert json.loads(out)["error"] == "usage-error"


class TestJsonOutputs:
    def test_fourier_sin_sum(self, capsys):
        code, out, err = run_cli(capsys, "fourier", "--check", "sin-sum", "--q", "101")
        assert code == 0
        payload = json.loads(out)
        assert 602.8 <= payload["value"] <= 602.9
        assert payload["passes"] is False
        manifest = json.loads(err)
        assert manifest["subcommand"] == "fourier"
        assert manifest["version"]

    def test_certify_shape(self, capsys):
        code, out, _ = run_cli(capsys, "certify", "--sys", "q=10,exclude=7",
                               "--ell-max", "1")
        assert code == 0
        payload = json.loads(out)
        assert payload["certified"] is False
        assert payload["q"] == 10
        assert {"rowSumBound", "powerEstimate", "threshold", "ell"} <= set(payload)

    def test_census(self, capsys):
        code, out, _ = run_cli(capsys, "census", "--sys", "q=10,D=7-9", "--x", "1000")
        payload = json.loads(out)
        assert code == 0
        assert payload["countA"] == 39
        assert payload["sys"]["D"] == [7, 8, 9]

    def test_primes(self, capsys):
        code, out, _ = run_cli(capsys, "primes", "--limit", "100",
                               "--ap", "4,1", "--exp-sum", "0.5")
        payload = json.loads(out)
        assert payload["pi"] == 25
        assert payload["ap"]["count"] == 11
        assert payload["value"]["re"] == pytest.approx(-23.0)

    def test_rationals_as_strings(self, capsys):
        code, out, _ = run_cli(capsys, "dioph", "--psi", "constant:1/2",
                               "--cmd", "pairs", "--q", "2", "--r", "3")
        payload = json.loads(out)
        assert payload["exact"] == {"num": "1", "den": "36"}

    def test_gcdgraph_chow_bigints_as_strings(self, capsys):
        code, out, _ = run_cli(capsys, "gcdgraph", "--cmd", "chow", "--y", "10")
        payload = json.loads(out)
        assert payload["Q"] == "9699690"
        assert payload["B"] == {"num": "969969", "den": "40"}
        assert payload["maxMultiplicity"] == 2

    def test_arcs_main_term(self, capsys):
        code, out, _ = run_cli(capsys, "arcs", "--sys", "q=10,exclude=7", "-k", "3")
        payload = json.loads(out)
        assert code == 0
        assert round(payload["identitySum"]) == payload["exactCount"]

    def test_dioph_series_and_hausdorff(self, capsys):
        code, out, _ = run_cli(capsys, "dioph", "--psi", "power:1",
                               "--cmd", "series", "--Q", "1000")
        assert json.loads(out)["khinchinSum"] == pytest.approx(1.6439345, abs=1e-4)
        code, out, _ = run_cli(capsys, "dioph", "--psi", "power:2", "--cmd", "hausdorff")
        assert json.loads(out)["exponent"] == pytest.approx(0.5)


class TestCsvOutputs:
    def test_scan_stream(self, capsys):
        code, out, _ = run_cli(capsys, "fourier", "--check", "sin-sum",
                               "--scan", "100..103")
        lines = out.strip().split("\n")
        assert lines[0] == "q,value,threshold,passes"
        assert len(lines) == 5
        q, value, threshold, passes = lines[2].split(",")
        assert q == "101"
        assert 602.8 <= float(value) <= 602.9
        assert passes == "false"
        assert float(value) == F.sin_bound_sum(101).value

    def test_arcs_full_scan(self, capsys):
        code, out, _ = run_cli(capsys, "arcs", "--sys", "q=10,exclude=7",
                               "-k", "4", "--full-scan", "--A", "1.5")
        lines = out.strip().split("\n")
        assert lines[0] == "class,count,mass"
        assert len(lines) == 5
        total = sum(int(line.split(",")[1]) for line in lines[1:])
        assert total == 10**4


class TestDeterminism:
    def test_byte_identical_runs(self, capsys):
        _, out1, err1 = run_cli(capsys, "fourier", "--check", "refined", "--q", "31")
        _, out2, err2 = run_cli(capsys, "fourier", "--check", "refined", "--q", "31")
        assert out1 == out2
        assert json.loads(err1)["outputSha256"] == json.loads(err2)["outputSha256"]

    def test_thread_flag_does_not_change_output(self, capsys):
        _, out1, _ = run_cli(capsys, "certify", "--sys", "q=10,exclude=3", "--ell-max", "1")
        _, out2, _ = run_cli(capsys, "--threads", "8", "certify", "--sys",
                             "q=10,exclude=3", "--ell-max", "1")
        assert out1 == out2

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "restricta", "primes", "--limit", "50"],
            capture_output=True,
            text=True,
            env={"PYTHONPATH": SRC, "PATH": "/usr/bin:/bin"},
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["pi"] == 15
        manifest = json.loads(proc.stderr)
        assert manifest["outputSha256"]
