"""End-to-end command-line checks (in-process via cli.main)."""

import json

import numpy as np
import pytest

from ionramsey.cli import main
from ionramsey.protocols import synthesize_signal


def write_config(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


RAMSEY_INI = """
[run]
seed = 42

[ramsey]
protocol = ghz
n_ions = 3
t_ramsey = 1.0
omega_0 = 0.1
omega_r = 0.62359877559829887
shots = 1500
"""


class TestRamseyCommand:
    def test_sampled_run_outputs(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "r.ini", RAMSEY_INI)
        out = tmp_path / "out"
        assert main(["ramsey", "--config", cfg, "--out", str(out)]) == 0
        csv_text = (out / "ramsey.csv").read_text()
        assert csv_text.startswith("# command=ramsey\n# manifest_sha256=")
        summary = json.loads((out / "ramsey_summary.json").read_text())
        assert summary["meta"]["seed"] == 42
        assert summary["shots"] == 1500
        # half-fringe setup: estimate should sit near the true detuning
        assert summary["estimate_delta_omega"] == pytest.approx(
            summary["delta_omega"], abs=5 * summary["estimate_sigma"]
        )

    def test_thread_invariance_and_force(self, tmp_path):
        cfg = write_config(tmp_path, "r.ini", RAMSEY_INI)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["ramsey", "--config", cfg, "--out", str(a), "--threads", "1"]) == 0
        assert main(["ramsey", "--config", cfg, "--out", str(b), "--threads", "4"]) == 0
        assert (a / "ramsey.csv").read_bytes() == (b / "ramsey.csv").read_bytes()
        assert (a / "ramsey_summary.json").read_bytes() == (
            b / "ramsey_summary.json"
        ).read_bytes()
        # Re-running into the same directory requires --force.
        assert main(["ramsey", "--config", cfg, "--out", str(a)]) == 2
        assert main(["ramsey", "--config", cfg, "--out", str(a), "--force"]) == 0

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg = write_config(tmp_path, "r.ini", RAMSEY_INI)
        a, b = tmp_path / "a", tmp_path / "b"
        main(["ramsey", "--config", cfg, "--out", str(a), "--seed", "7"])
        main(["ramsey", "--config", cfg, "--out", str(b)])
        sa = json.loads((a / "ramsey_summary.json").read_text())
        sb = json.loads((b / "ramsey_summary.json").read_text())
        assert sa["meta"]["seed"] == 7
        assert sb["meta"]["seed"] == 42
        assert sa["mean_outcome"] != sb["mean_outcome"]

    def test_expectation_mode_scan(self, tmp_path):
        ini = """
[ramsey]
protocol = ghz
n_ions = 4
t_ramsey = 1.0
omega_0 = 0.0
omega_r = 0.4
scan_points = 96
scan_t_max = 3.9269908169872414
"""
        cfg = write_config(tmp_path, "e.ini", ini)
        out = tmp_path / "out"
        code = main(
            ["ramsey", "--config", cfg, "--out", str(out), "--expectation-mode"]
        )
        assert code == 0
        summary = json.loads((out / "ramsey_summary.json").read_text())
        assert summary["fitted_fringe_frequency"] == pytest.approx(
            4 * 0.4, rel=1e-6
        )

    def test_json_format(self, tmp_path):
        cfg = write_config(tmp_path, "r.ini", RAMSEY_INI)
        out = tmp_path / "out"
        main(["ramsey", "--config", cfg, "--out", str(out), "--format", "json"])
        rows = json.loads((out / "ramsey.json").read_text())["rows"]
        assert rows[0]["protocol"] == "ghz_parity"
        assert set(rows[0]) == {
            "protocol", "L", "T_R", "omega_R", "seed", "outcome", "estimate", "sigma",
        }


class TestErrorPaths:
    def test_unknown_key_exits_2(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path, "bad.ini", "[ramsey]\nprotocol = ghz\nn_ions = 2\nt_ramsey = 1\nomega_r = 0.1\nbogus = 1\n"
        )
        assert main(["ramsey", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ConfigError"
        assert "bogus" in err["message"]

    def test_unknown_section_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "bad.ini", "[ramsey]\nn_ions = 2\n[mystery]\nx = 1\n")
        assert main(["ramsey", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_missing_config_exits_2(self, tmp_path):
        assert (
            main(["ramsey", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)])
            == 2
        )

    def test_capacity_exits_3(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "big.ini",
            "[ramsey]\nprotocol = ghz\nn_ions = 30\nt_ramsey = 1.0\nomega_r = 0.1\n",
        )
        assert main(["ramsey", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
        assert json.loads(capsys.readouterr().err)["error"] == "CapacityError"

    def test_non_convergence_exits_4(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "cal.ini",
            "[calibrate]\nn_ions = 4\nomega_0 = 0.61803\nomega_r1 = 0.50\n"
            "omega_r2 = 0.70\nt_r1 = 0.02\nt_r2 = 2.0\nmax_iter = 1\n",
        )
        assert main(["calibrate", "--config", cfg, "--out", str(tmp_path / "o")]) == 4
        assert json.loads(capsys.readouterr().err)["error"] == "ConvergenceError"

    def test_ambiguous_fringe_exits_4(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            "wrap.ini",
            "[ramsey]\nprotocol = ghz\nn_ions = 4\nt_ramsey = 1.0\nomega_0 = 0.0\n"
            "omega_r = 2.0\nshots = 10\n",
        )
        assert main(["ramsey", "--config", cfg, "--out", str(tmp_path / "o")]) == 4
        assert json.loads(capsys.readouterr().err)["error"] == "AmbiguousFringeError"

    def test_bad_threads_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "r.ini", RAMSEY_INI)
        assert main(["ramsey", "--config", cfg, "--out", str(tmp_path / "o"), "--threads", "0"]) == 2


class TestOtherCommands:
    def test_scaling_expectation(self, tmp_path):
        cfg = write_config(
            tmp_path, "s.ini", "[scaling]\nl_values = 1, 2, 4, 8\ntrials = 100\n"
        )
        out = tmp_path / "out"
        code = main(
            ["scaling", "--config", cfg, "--out", str(out), "--expectation-mode"]
        )
        assert code == 0
        summary = json.loads((out / "scaling_summary.json").read_text())
        assert summary["slopes"]["standard"] == pytest.approx(-0.5, abs=1e-12)
        assert summary["slopes"]["ghz"] == pytest.approx(-1.0, abs=1e-12)

    def test_scaling_sampled_determinism(self, tmp_path):
        cfg = write_config(
            tmp_path, "s.ini", "[scaling]\nl_values = 1, 2\ntrials = 1200\n"
        )
        a, b = tmp_path / "a", tmp_path / "b"
        main(["scaling", "--config", cfg, "--out", str(a), "--seed", "3"])
        main(["scaling", "--config", cfg, "--out", str(b), "--seed", "3", "--threads", "3"])
        assert (a / "scaling.csv").read_bytes() == (b / "scaling.csv").read_bytes()

    def test_dephasing_analytic(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "d.ini",
            "[dephasing]\ngamma = 0.5\nn_ions = 3\nt_min = 0.05\nt_max = 3.0\n"
            "grid_points = 9\ntrials = 50\n",
        )
        out = tmp_path / "out"
        code = main(
            ["dephasing", "--config", cfg, "--out", str(out), "--expectation-mode"]
        )
        assert code == 0
        summary = json.loads((out / "dephasing_summary.json").read_text())
        assert summary["mode"] == "analytic"
        assert summary["t_opt"]["standard"] == pytest.approx(1.0, rel=1e-2)
        assert summary["t_opt"]["ghz"] == pytest.approx(1 / 3, rel=1e-2)
        assert summary["min_ratio"] == pytest.approx(1.0, abs=1e-2)

    def test_calibrate_biased(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "c.ini",
            "[calibrate]\nn_ions = 4\nomega_0 = 0.61803\nomega_r1 = 0.50\n"
            "omega_r2 = 0.70\nt_r1 = 0.02\nt_r2 = 2.0\nbias_tc = 5.0\n",
        )
        out = tmp_path / "out"
        assert main(["calibrate", "--config", cfg, "--out", str(out)]) == 0
        summary = json.loads((out / "calibrate_summary.json").read_text())
        assert summary["error_in_fringe_widths"] < 1e-3
        assert summary["naive_offset"] > 0.01
        lines = (out / "calibrate.csv").read_text().splitlines()
        assert "iteration,omega_r1,omega_r2,phi_f,omega0_estimate" in lines

    def test_fourier_from_file(self, tmp_path):
        # Round-trip an externally supplied signal file at 1e-6.
        rng = np.random.default_rng(12)
        n_ions, dw = 5, 1.1
        c = rng.uniform(0.05, 0.35, size=n_ions)
        xi = rng.uniform(-np.pi, np.pi, size=n_ions)
        t = 2 * np.pi / dw * np.arange(128) / 128
        sig = synthesize_signal(t, dw, c, xi)
        data = tmp_path / "sig.csv"
        data.write_text(
            "# synthetic multi-harmonic fringe\nt,signal\n"
            + "".join(f"{float(tt)!r},{float(ss)!r}\n" for tt, ss in zip(t, sig))
        )
        cfg = write_config(
            tmp_path,
            "f.ini",
            f"[fourier]\ninput = {data}\nn_ions = {n_ions}\ndelta_omega = {dw}\n",
        )
        out = tmp_path / "out"
        assert main(["fourier", "--config", cfg, "--out", str(out)]) == 0
        rows = (out / "fourier.csv").read_text().splitlines()
        got = {}
        for line in rows:
            if line.startswith("#") or line.startswith("p,"):
                continue
            p, cp, xip = line.split(",")
            got[int(p)] = (float(cp), float(xip))
        for p in range(1, n_ions + 1):
            assert got[p][0] == pytest.approx(c[p - 1], abs=1e-6)

    def test_fourier_needs_a_source(self, tmp_path):
        cfg = write_config(
            tmp_path, "f.ini", "[fourier]\nn_ions = 3\ndelta_omega = 1.0\n"
        )
        assert main(["fourier", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_fourier_accepts_any_header_name(self, tmp_path):
        dw = 1.0
        t = 2 * np.pi * np.arange(16) / 16
        data = tmp_path / "sig.csv"
        data.write_text(
            "# provenance comment\nt_ramsey,signal\n"
            + "".join(f"{float(tt)!r},{float(np.cos(tt))!r}\n" for tt in t)
        )
        cfg = write_config(
            tmp_path,
            "f.ini",
            f"[fourier]\ninput = {data}\nn_ions = 1\ndelta_omega = {dw}\n",
        )
        assert main(["fourier", "--config", cfg, "--out", str(tmp_path / "o")]) == 0

    def test_fourier_rejects_malformed_row(self, tmp_path, capsys):
        data = tmp_path / "sig.csv"
        data.write_text("t,signal\n0.1,0.5\noops,not-a-number\n")
        cfg = write_config(
            tmp_path,
            "f.ini",
            f"[fourier]\ninput = {data}\nn_ions = 1\ndelta_omega = 1.0\n",
        )
        assert main(["fourier", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        err = json.loads(capsys.readouterr().err)
        assert "line 3" in err["message"]
