import json

import numpy as np

import spinsqueeze as sq
from spinsqueeze.cli import run_cli


def run(capsys, *argv):
    code = run_cli(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestExitCodes:
    def test_missing_subcommand(self, capsys):
        code, _, _ = run(capsys, )
        assert code == 2

    def test_unknown_flag(self, capsys):
        code, _, _ = run(capsys, "oat", "--n", "4", "--theta", "0.1", "--bogus")
        assert code == 2

    def test_missing_config_file(self, capsys):
        code, _, err = run(capsys, "sweep", "--config", "missing.toml")
        assert code == 2

    def test_numeric_failure(self, capsys):
        code, _, err = run(capsys, "metrics", "--state", "css", "--n", "4", "--theta", "9.0")
        assert code == 1
        assert "error" in err

    def test_success(self, capsys):
        code, out, _ = run(capsys, "oat", "--n", "12", "--theta", "0.3")
        assert code == 0
        assert out.startswith("n,")


class TestOatCommand:
    def test_json_value_matches_closed_form(self, capsys):
        code, out, _ = run(capsys, "oat", "--n", "12", "--theta", "0.3", "--format", "json")
        assert code == 0
        row = json.loads(out)[0]
        want = 1.0 - 11.0 * sq.oat_concurrence(12, 0.3)
        assert abs(row["xi_S2"] - want) < 1e-12

    def test_seventeen_digit_floats(self, capsys):
        _, out, _ = run(capsys, "oat", "--n", "12", "--theta", "0.3")
        cell = out.splitlines()[1].split(",")[2]
        assert len(cell.replace("-", "").replace(".", "").replace("e", "").lstrip("0")) >= 16


class TestMetricsCommand:
    def test_css_all_unit(self, capsys):
        code, out, _ = run(
            capsys, "metrics", "--state", "css", "--n", "4", "--theta", "1.0",
            "--phi", "0.5", "--format", "json",
        )
        assert code == 0
        row = json.loads(out)[0]
        for key in ("xi_S2", "xi_R2", "xi_Rprime2", "xi_D2", "xi_E2", "tilde_xi_E2"):
            assert abs(row[key] - 1.0) < 1e-10

    def test_dicke_needs_m(self, capsys):
        code, _, err = run(capsys, "metrics", "--state", "dicke", "--n", "4")
        assert code == 1


class TestChannelCommand:
    def test_csv_shape(self, capsys):
        code, out, _ = run(
            capsys, "channel", "--channel", "pdc", "--n", "12", "--theta0", "0.5",
            "--p", "0:0.9:10",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "p,xi_S2,xi_R2,tilde_xi_E2,Cr"
        assert len(lines) == 11

    def test_squeezing_dies_at_large_p(self, capsys):
        _, out, _ = run(
            capsys, "channel", "--channel", "dpc", "--n", "12", "--theta0", "1.5",
            "--p", "0:0.99:12",
        )
        rows = [ln.split(",") for ln in out.strip().splitlines()[1:]]
        cr = [float(r[4]) for r in rows]
        assert cr[0] > 0.0
        assert cr[-1] == 0.0


class TestRamseyCommand:
    def test_sweep_columns(self, capsys):
        code, out, _ = run(
            capsys, "ramsey", "--n", "8", "--state", "css", "--readout", "jz",
            "--phi", "0.2:3.0:7",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "phi,signal,dsignal,dphi"
        assert len(lines) == 8

    def test_zero_slope_row_flagged_empty(self, capsys):
        _, out, _ = run(
            capsys, "ramsey", "--n", "8", "--state", "css", "--readout", "jz",
            "--phi", "0.0,1.0",
        )
        rows = out.strip().splitlines()[1:]
        assert rows[0].endswith(",")  # dphi empty at phi = 0
        assert not rows[1].endswith(",")


class TestQndCommand:
    def test_json_fields(self, capsys):
        code, out, _ = run(
            capsys, "qnd", "--n", "10000", "--photons", "256000", "--chi", "5e-5",
            "--eta", "0.14", "--trials", "2000", "--seed", "3", "--format", "json",
        )
        assert code == 0
        row = json.loads(out)[0]
        assert abs(row["kappa2"] - 1.6) < 1e-12
        assert "mc_ratio" in row and "db_with_loss" in row


class TestDeterminism:
    def test_byte_identical_runs(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        for path in (out1, out2):
            code = run_cli(
                ["kicked-top", "--kappa", "3", "--spin-j", "25", "--theta0", "2.25",
                 "--phi0", "0.5", "--kicks", "30", "--out", str(path)]
            )
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_qnd_seeded_runs_identical(self, tmp_path):
        args = ["qnd", "--n", "4000", "--photons", "64000", "--chi", "1e-4",
                "--trials", "5000", "--seed", "11", "--format", "json"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli(args + ["--out", str(a)]) == 0
        assert run_cli(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestSweep:
    def write_config(self, tmp_path, text):
        path = tmp_path / "sweep.cfg"
        path.write_text(text)
        return str(path)

    def test_oat_sweep_unimodal(self, tmp_path, capsys):
        n = 1000
        theta0 = 12.0 ** (1.0 / 6.0) * (n / 2.0) ** (-2.0 / 3.0)
        cfg = self.write_config(
            tmp_path,
            f"op = oat\ngrid.n = {n}\ngrid.theta = {theta0/6.0}:{3.0*theta0}:40\n",
        )
        code, out, _ = run(capsys, "sweep", "--config", cfg)
        assert code == 0
        lines = out.strip().splitlines()
        cols = lines[0].split(",")
        idx = cols.index("xi_S2")
        vals = [float(ln.split(",")[idx]) for ln in lines[1:]]
        k = int(np.argmin(vals))
        assert all(a > b for a, b in zip(vals[: k], vals[1 : k + 1]))
        assert all(a < b for a, b in zip(vals[k : -1], vals[k + 1 :]))

    def test_parallel_matches_serial(self, tmp_path):
        base = "op = channel\ngrid.channel = pdc\ngrid.n = 10\ngrid.theta0 = 0.4,0.9\ngrid.p = 0:0.9:7\n"
        cfg = self.write_config(tmp_path, base)
        out1, out2 = tmp_path / "w1.csv", tmp_path / "w4.csv"
        cfg1 = self.write_config(tmp_path, base + f"workers = 1\nout = {out1}\n")
        assert run_cli(["sweep", "--config", cfg1]) == 0
        cfg4 = self.write_config(tmp_path, base + f"workers = 4\nout = {out2}\n")
        assert run_cli(["sweep", "--config", cfg4]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_env_thread_cap_keeps_output(self, tmp_path, monkeypatch):
        base = "op = oat\ngrid.n = 12\ngrid.theta = 0.1:1.2:9\n"
        out1, out2 = tmp_path / "c1.csv", tmp_path / "c2.csv"
        cfg = self.write_config(tmp_path, base + f"workers = 8\nout = {out1}\n")
        monkeypatch.setenv("SQZ_THREADS", "1")
        assert run_cli(["sweep", "--config", cfg]) == 0
        monkeypatch.delenv("SQZ_THREADS")
        cfg2 = self.write_config(tmp_path, base + f"workers = 8\nout = {out2}\n")
        assert run_cli(["sweep", "--config", cfg2]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_unknown_operation_rejected(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, "op = teleport\ngrid.n = 2\n")
        code, _, err = run(capsys, "sweep", "--config", cfg)
        assert code == 2

    def test_empty_grid_rejected(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, "op = oat\ngrid.n = 12\ngrid.theta =\n")
        code, _, _ = run(capsys, "sweep", "--config", cfg)
        assert code == 2

    def test_bad_grid_count_rejected(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, "op = oat\ngrid.n = 12\ngrid.theta = 0:1:0\n")
        code, _, _ = run(capsys, "sweep", "--config", cfg)
        assert code == 2

    def test_per_point_failure_flagged(self, tmp_path, capsys):
        # theta outside [0, pi] in the metrics path is fine for oat (closed
        # forms accept any angle); provoke a failure through lmg gamma
        cfg = self.write_config(
            tmp_path, "op = lmg\ngrid.n = 8\ngrid.h = 0.5,1.0\ngrid.gamma = 0.2,1.5\n"
        )
        code, out, _ = run(capsys, "sweep", "--config", cfg)
        assert code == 0
        lines = out.strip().splitlines()
        assert "status" in lines[0]
        statuses = [ln.rsplit(",", 1)[-1] for ln in lines[1:]]
        assert any(s == "ok" for s in statuses)
        assert any(s.startswith("error") for s in statuses)

    def test_channel_figure_shape(self, tmp_path, capsys):
        # decoherence sweep reproduces the squeezing-death figure shape:
        # parameters decay with p and the witnesses vanish in order
        cfg = self.write_config(
            tmp_path,
            "op = channel\ngrid.channel = adc\ngrid.n = 12\ngrid.theta0 = 1.5\n"
            "grid.p = 0:0.98:40\n",
        )
        code, out, _ = run(capsys, "sweep", "--config", cfg)
        lines = out.strip().splitlines()
        cols = lines[0].split(",")
        rows = [ln.split(",") for ln in lines[1:]]
        cr = [float(r[cols.index("Cr")]) for r in rows]
        tilde = [float(r[cols.index("tilde_xi_E2")]) for r in rows]
        assert cr[0] > 0 and cr[-1] == 0.0
        p_die_cr = next(i for i, v in enumerate(cr) if v == 0.0)
        p_die_tilde = next((i for i, v in enumerate(tilde) if v >= 1.0), len(tilde))
        assert p_die_tilde >= p_die_cr

    def test_svg_output(self, tmp_path):
        out = tmp_path / "plot.svg"
        cfg = self.write_config(
            tmp_path, f"op = oat\ngrid.n = 50\ngrid.theta = 0.01:0.6:30\nformat = svg\nout = {out}\n"
        )
        assert run_cli(["sweep", "--config", cfg]) == 0
        text = out.read_text()
        assert text.startswith("<svg") and "polyline" in text


class TestTatCommand:
    def test_trajectory_columns(self, capsys):
        code, out, _ = run(capsys, "tat", "--n", "14", "--chi-t", "0.1", "--points", "5")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,chi_t,xi_S2,xi_R2,tilde_xi_E2,Jx,Jy,Jz"
        assert len(lines) == 6
        last = lines[-1].split(",")
        assert float(last[2]) < 1.0  # squeezed inside the window


class TestHusimiCommand:
    def test_grid_output(self, capsys):
        code, out, _ = run(
            capsys, "husimi", "--n", "12", "--theta", "1.5707963", "--oat-chi-t", "0.1",
            "--n-theta", "6", "--n-phi", "8",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "theta,phi,q"
        assert len(lines) == 49
        q = [float(ln.split(",")[2]) for ln in lines[1:]]
        assert all(0.0 <= v <= 1.0 for v in q)


class TestLmgCommand:
    def test_h_grid(self, capsys):
        code, out, _ = run(
            capsys, "lmg", "--n", "32", "--gamma", "0.0", "--h-grid", "0.6", "1.4", "5",
        )
        assert code == 0
        assert len(out.strip().splitlines()) == 6
