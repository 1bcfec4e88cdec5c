import json

import numpy as np
import pytest

from qreset.cli import main
from qreset.serialize import save_matrix
from qreset.twospin import TwoSpinParams, hamiltonian


def run(args):
    return main(args)


def read(path):
    return path.read_bytes()


class TestNess:
    def test_two_spin_point(self, tmp_path, capsys):
        out = tmp_path / "row.csv"
        assert run(["ness", "--R", "1", "--alpha", "1", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "r,alpha,t,entropy,fidelity,purity,concurrence"
        cells = lines[1].split(",")
        assert float(cells[4]) == pytest.approx(59.0 / 72.0, abs=1e-12)

    def test_physical_flags(self, tmp_path):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert run(["ness", "--R", "0.5", "--alpha", "2", "--out", str(out_a)]) == 0
        assert run(
            ["ness", "--omega", "2", "--j", "4", "--r", "1", "--out", str(out_b)]
        ) == 0
        assert read(out_a) == read(out_b)

    def test_rejects_mixed_flag_styles(self):
        assert run(["ness", "--R", "1", "--omega", "1"]) == 4

    def test_rejects_zero_rate(self):
        assert run(["ness", "--R", "0"]) == 4

    def test_generic_hamiltonian(self, tmp_path):
        hpath = tmp_path / "h.json"
        rpath = tmp_path / "rho.json"
        out = tmp_path / "report.json"
        p = TwoSpinParams.from_dimensionless(1.0, 1.0)
        save_matrix(hamiltonian(p), hpath)
        rho0 = np.zeros((4, 4), dtype=complex)
        rho0[3, 3] = 1.0
        save_matrix(rho0, rpath)
        rc = run(
            [
                "ness",
                "--hamiltonian", str(hpath),
                "--rho0", str(rpath),
                "--r", "1.0",
                "--split", "2:2",
                "--out", str(out),
            ]
        )
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["dim"] == 4
        assert report["purity"] == pytest.approx(59.0 / 72.0, abs=1e-10)
        assert report["fidelity_rho0"] == pytest.approx(59.0 / 72.0, abs=1e-8)
        assert report["concurrence"] == pytest.approx(0.2035801390, abs=1e-8)
        assert len(report["ness_matrix"]) == 16

    def test_generic_rejects_invalid_rho0(self, tmp_path):
        hpath = tmp_path / "h.json"
        rpath = tmp_path / "rho.json"
        save_matrix(np.diag([1.0, -1.0]).astype(complex), hpath)
        save_matrix(np.diag([0.7, 0.7]).astype(complex), rpath)  # trace 1.4
        assert run(
            ["ness", "--hamiltonian", str(hpath), "--rho0", str(rpath), "--r", "1"]
        ) == 4

    def test_generic_missing_file(self, tmp_path):
        assert run(
            [
                "ness",
                "--hamiltonian", str(tmp_path / "absent.json"),
                "--rho0", str(tmp_path / "absent2.json"),
                "--r", "1",
            ]
        ) == 4


class TestSweep:
    def test_deterministic_bytes(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["sweep", "--grid-r", "0.1:5:4:log", "--grid-alpha", "0:2:3"]
        assert run(args + ["--out", str(out1)]) == 0
        assert run(args + ["--out", str(out2)]) == 0
        assert read(out1) == read(out2)

    def test_threads_do_not_change_bytes(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["sweep", "--grid-r", "0.1:5:4:log", "--grid-alpha", "0:2:3"]
        assert run(args + ["--out", str(out1), "--threads", "1"]) == 0
        assert run(args + ["--out", str(out2), "--threads", "4"]) == 0
        assert read(out1) == read(out2)

    def test_env_threads_used_when_flag_absent(self, tmp_path, monkeypatch):
        out1 = tmp_path / "a.csv"
        monkeypatch.setenv("QRESET_THREADS", "3")
        args = ["sweep", "--grid-r", "0.5:1:2", "--grid-alpha", "0:1:2",
                "--out", str(out1)]
        assert run(args) == 0

    def test_bad_env_threads(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QRESET_THREADS", "many")
        assert run(
            ["sweep", "--grid-r", "0.5:1:2", "--grid-alpha", "0:1:2"]
        ) == 4

    def test_flag_wins_over_env(self, tmp_path, monkeypatch):
        # an unusable env value is ignored when --threads is given
        monkeypatch.setenv("QRESET_THREADS", "many")
        out = tmp_path / "a.csv"
        assert run(
            ["sweep", "--grid-r", "0.5:1:2", "--grid-alpha", "0:1:2",
             "--threads", "2", "--out", str(out)]
        ) == 0

    def test_row_count(self, tmp_path):
        out = tmp_path / "grid.csv"
        assert run(
            [
                "sweep",
                "--grid-r", "0.1:1:5",
                "--grid-alpha", "0:3:4",
                "--observables", "entropy,fidelity",
                "--out", str(out),
            ]
        ) == 0
        assert len(out.read_text().splitlines()) == 1 + 5 * 4

    def test_jsonl_format(self, tmp_path):
        out = tmp_path / "grid.jsonl"
        assert run(
            [
                "sweep",
                "--grid-r", "1:1:1",
                "--grid-alpha", "0:0:1",
                "--observables", "fidelity",
                "--format", "jsonl",
                "--out", str(out),
            ]
        ) == 0
        rows = [json.loads(line) for line in out.read_text().splitlines()]
        assert rows == [{"r": 1.0, "alpha": 0.0, "fidelity": 0.65}]

    def test_invalid_grid(self):
        assert run(["sweep", "--grid-r", "junk", "--grid-alpha", "0:1:2"]) == 4

    def test_zero_rate_grid_rejected(self):
        assert run(["sweep", "--grid-r", "0:1:2", "--grid-alpha", "0:1:2"]) == 4

    def test_log_grid_rejects_zero_lo(self):
        assert run(
            ["sweep", "--grid-r", "0:1:2:log", "--grid-alpha", "0:1:2"]
        ) == 4


class TestTimeseries:
    def test_basic(self, tmp_path):
        out = tmp_path / "ts.csv"
        assert run(
            [
                "timeseries",
                "--R", "0.5",
                "--grid-t", "0:10:11",
                "--observables", "entropy,fidelity",
                "--out", str(out),
            ]
        ) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 12
        first = lines[1].split(",")
        assert float(first[2]) == 0.0   # t
        assert float(first[3]) == 0.0   # entropy
        assert float(first[4]) == 1.0   # fidelity


class TestOptimize:
    def test_interior_peak(self, capsys):
        assert run(["optimize", "--alpha", "2", "--r-bounds", "0.01:10"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["flag"] == "interior"
        assert report["c_star"] == pytest.approx(0.432039, abs=1e-5)

    def test_degenerate_flat(self, capsys):
        assert run(["optimize", "--alpha", "0", "--r-bounds", "0.01:10"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["flag"] == "degenerate"

    def test_bad_bounds(self):
        assert run(["optimize", "--alpha", "2", "--r-bounds", "5:1"]) == 4


class TestCritical:
    def test_default_box(self, capsys):
        assert run(["critical"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["r_c"] == pytest.approx(0.12, abs=0.01)
        assert report["alpha_c"] == pytest.approx(1.27, abs=0.01)
        assert report["residual_slope"] < 1e-7
        assert report["residual_curvature"] < 1e-7

    def test_unbracketed_box_is_solver_failure(self):
        assert run(["critical", "--box", "0.2:0.3:0.8:2.0"]) == 3


class TestPeakR:
    def test_basic(self, capsys):
        assert run(["peak-r", "--t", "5", "--r-bounds", "0.001:3"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["flag"] == "interior"
        assert report["r_star"] == pytest.approx(0.266278, abs=1e-4)


class TestMcValidate:
    def test_passes(self, capsys):
        rc = run(
            [
                "mc-validate",
                "--R", "1", "--alpha", "1",
                "--t", "2", "--ntraj", "2000", "--seed", "9",
            ]
        )
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] is True
        assert report["max_std_dev"] <= 5.0

    def test_failure_exit_code(self, capsys):
        rc = run(
            [
                "mc-validate",
                "--R", "1", "--alpha", "1",
                "--t", "2", "--ntraj", "500", "--seed", "9",
                "--threshold", "1e-9",
            ]
        )
        assert rc == 2

    def test_against_ness(self, capsys):
        rc = run(
            [
                "mc-validate",
                "--R", "1", "--alpha", "1",
                "--t", "40", "--ntraj", "2000", "--seed", "10",
                "--against", "ness",
            ]
        )
        assert rc == 0


class TestParsing:
    def test_unknown_command(self):
        assert run(["frobnicate"]) == 4

    def test_no_command(self):
        assert run([]) == 4

    def test_help_exits_zero(self):
        assert run(["--help"]) == 0
