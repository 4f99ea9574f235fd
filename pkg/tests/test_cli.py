"""End-to-end checks of the command-line interface.

Everything goes through cli.main so the exit statuses and the stdout/stderr
split are exercised exactly as a shell would see them.
"""

import json

import numpy as np
import pytest

from branchwaves import analysis, cli


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


class TestWave:
    def test_critical_wave_passes(self, tmp_path, capsys):
        out = tmp_path / "w.csv"
        code, payload, _ = run_json(capsys, "wave", "--out", out)
        assert code == 0
        assert payload["passed"] is True
        assert payload["limits"]["i_minus_inf"] == 2.0
        assert abs(payload["limits"]["i_plus_inf"]) < 1e-3
        assert set(payload) >= {"limits", "residuals", "rates", "profile"}

        lines = out.read_text().splitlines()
        assert lines[0] == "z,a,b,i"
        for line in lines[1:6]:
            for field in line.split(","):
                assert format(float(field), ".17g") == field

        # the reported maximum is located between samples, so the sampled
        # column tops out a hair below it
        data = np.genfromtxt(out, delimiter=",", names=True)
        assert data["a"].max() == pytest.approx(payload["profile"]["a_max"], rel=1e-4)
        assert data["a"].max() <= payload["profile"]["a_max"]

    def test_invalid_regime_exits_2(self, tmp_path, capsys):
        out = tmp_path / "w.csv"
        code, _, err = run(capsys, "wave", "--c", 1, "--i-minus", 1.5, "--out", out)
        assert code == 2
        assert "invalid regime" in err
        assert "1.25" in err
        assert not out.exists()


class TestPde:
    def test_front_run(self, tmp_path, capsys):
        prefix = tmp_path / "sm"
        code, payload, _ = run_json(
            capsys, "pde", "--grid", "501:-20:60", "--t-end", 10, "--out", prefix
        )
        assert code == 0
        assert set(payload) >= {"c_est", "window", "residual", "plateau", "snapshots"}
        assert payload["window"] == [5.0, 10.0]
        assert 1.5 < payload["c_est"] < 2.1
        assert len(payload["snapshots"]) == 3
        for name in payload["snapshots"]:
            lines = open(name).read().splitlines()
            assert lines[0] == "x,A,I"
            assert len(lines) == 502

    def test_initial_data_round_trips(self, tmp_path, capsys):
        first = tmp_path / "a"
        code, payload, _ = run_json(
            capsys, "pde", "--grid", "501:-20:60", "--t-end", 4, "--out", first
        )
        assert code == 0
        handoff = payload["snapshots"][-1]

        second = tmp_path / "b"
        code, payload2, _ = run_json(
            capsys, "pde", "--initial", handoff, "--t-end", 4, "--out", second
        )
        assert code == 0
        # the t = 0 snapshot of the restart must reproduce the handoff file
        # bit for bit: 17 significant digits round-trip doubles exactly
        assert open(payload2["snapshots"][0]).read() == open(handoff).read()

    def test_blow_up_exits_3(self, tmp_path, capsys):
        xs = np.linspace(-10.0, 10.0, 201)
        bad = tmp_path / "bad.csv"
        np.savetxt(
            bad,
            np.column_stack([xs, np.exp(-(xs**2)), np.full_like(xs, -12.0)]),
            delimiter=",",
            header="x,A,I",
            comments="",
            fmt="%.17g",
        )
        code, _, err = run(
            capsys, "pde", "--initial", bad, "--t-end", 8, "--out", tmp_path / "x"
        )
        assert code == 3
        assert "blow-up" in err

    def test_save_all_writes_every_snapshot(self, tmp_path, capsys):
        code, payload, _ = run_json(
            capsys, "pde", "--grid", "321:-10:20", "--t-end", 2, "--save-all",
            "--out", tmp_path / "all",
        )
        assert code == 0
        assert len(payload["snapshots"]) == 5

    def test_nonuniform_initial_rejected(self, tmp_path, capsys):
        xs = np.concatenate([np.linspace(0, 1, 10), np.linspace(1.3, 2, 10)])
        bad = tmp_path / "bad.csv"
        np.savetxt(
            bad,
            np.column_stack([xs, xs * 0, xs * 0]),
            delimiter=",", header="x,A,I", comments="",
        )
        code, _, err = run(capsys, "pde", "--initial", bad, "--out", tmp_path / "x")
        assert code == 64
        assert "uniform" in err


class TestEvans:
    def test_self_test_winds_once(self, tmp_path, capsys):
        out = tmp_path / "st.csv"
        code, payload, _ = run_json(capsys, "evans", "--self-test", "--out", out)
        assert code == 0
        assert payload["winding"] == 1
        assert payload["L"] is None
        lines = out.read_text().splitlines()
        assert lines[0] == "re_gamma,im_gamma,re_E,im_E"
        assert len(lines) == payload["evaluations"] + 1

    def test_small_contour_winds_zero(self, tmp_path, capsys):
        out = tmp_path / "ev.csv"
        code, payload, _ = run_json(
            capsys, "evans", "--contour", "0.1:10:32", "--out", out
        )
        assert code == 0
        assert payload["winding"] == 0
        assert payload["L"] >= 30.0
        assert payload["max_arg_step"] <= np.pi / 3
        data = np.genfromtxt(out, delimiter=",", names=True)
        assert data.shape[0] == payload["evaluations"]
        # samples live on the contour: moduli within the requested annulus
        moduli = np.hypot(data["re_gamma"], data["im_gamma"])
        assert moduli.min() >= 0.1 - 1e-12
        assert moduli.max() <= 10.0 + 1e-12

    def test_invalid_regime_exits_2(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "evans", "--c", 1, "--i-minus", 1.5, "--out", tmp_path / "e.csv"
        )
        assert code == 2
        assert "invalid regime" in err


class TestFormulas:
    def test_minimal_speed_note(self, capsys):
        code, out, _ = run(capsys, "formulas", "--c", 2, "--r", 0)
        assert code == 0
        assert "i_c (minimal inactive level ahead) = 0" in out
        assert "minimal front speed" in out
        assert "2 -> 0" in out

    def test_subcritical_threshold(self, capsys):
        code, out, _ = run(capsys, "formulas", "--c", 1, "--r", 0)
        assert code == 0
        assert "= 0.75" in out

    def test_general_units_block(self, capsys):
        code, out, _ = run(
            capsys, "formulas", "--general", "rS=2,rA=4,rI=2,D=1", "--c", 2
        )
        assert code == 0
        assert "limit sum = 4" in out
        assert "normalized speed = 1" in out

    def test_json_payload(self, capsys):
        code, payload, _ = run_json(capsys, "formulas", "--c", 1, "--r", 0, "--json")
        assert code == 0
        assert payload["i_c"] == 0.75
        assert payload["limit_pairs"] == [[1.2, 0.8]]
        assert payload["general"] is None
        rate = payload["decay_rates"]["1.2"]
        assert rate == pytest.approx(analysis.decay_rate(1.2, 1.0))

    def test_missing_general_key_exits_64(self, capsys):
        code, _, err = run(capsys, "formulas", "--general", "rS=2,rA=4")
        assert code == 64

    def test_nonpositive_speed_exits_64(self, capsys):
        code, _, err = run(capsys, "formulas", "--c", 0)
        assert code == 64


class TestVerify:
    def test_single_criterion_passes(self, capsys):
        code, out, err = run(capsys, "verify", "--only", "rescaling")
        assert code == 0
        assert out.startswith("[PASS] rescaling")
        assert err == ""

    def test_unmatched_filter_exits_64(self, capsys):
        code, _, err = run(capsys, "verify", "--only", "nonsense")
        assert code == 64
        assert "matches no criterion" in err

    def test_tolerance_override_fails_cleanly(self, capsys):
        code, out, err = run(
            capsys, "verify", "--only", "rescaling", "--tol", "rescaling=1e-20"
        )
        assert code == 1
        assert "[FAIL] rescaling" in out
        assert "FAILED: rescaling" in err

    def test_unknown_tolerance_name_exits_64(self, capsys):
        code, _, err = run(capsys, "verify", "--tol", "bogus=1")
        assert code == 64
        assert "bogus" in err


class TestConfig:
    def test_config_supplies_defaults(self, tmp_path, capsys):
        cfg = tmp_path / "f.cfg"
        cfg.write_text("c = 1\nr = 0\n# comment\n\n")
        code, payload, _ = run_json(capsys, "formulas", "--config", cfg, "--json")
        assert code == 0
        assert payload["c"] == 1.0
        assert payload["i_c"] == 0.75

    def test_flag_overrides_config(self, tmp_path, capsys):
        cfg = tmp_path / "f.cfg"
        cfg.write_text("c = 1\n")
        code, payload, _ = run_json(
            capsys, "formulas", "--config", cfg, "--c", 2, "--json"
        )
        assert code == 0
        assert payload["c"] == 2.0
        assert payload["i_c"] == 0.0

    def test_unknown_config_key_exits_64(self, tmp_path, capsys):
        cfg = tmp_path / "f.cfg"
        cfg.write_text("bogus = 1\n")
        code, _, err = run(capsys, "formulas", "--config", cfg)
        assert code == 64
        assert "bogus" in err

    def test_missing_config_file_exits_64(self, tmp_path, capsys):
        code, _, err = run(capsys, "formulas", "--config", tmp_path / "absent.cfg")
        assert code == 64


class TestUsage:
    def test_unknown_flag_exits_64(self, capsys):
        code, _, _ = run(capsys, "wave", "--bogus")
        assert code == 64

    def test_missing_subcommand_exits_64(self, capsys):
        code, _, _ = run(capsys)
        assert code == 64

    def test_help_exits_0(self, capsys):
        code, out, _ = run(capsys, "--help")
        assert code == 0
        assert "wave" in out and "verify" in out
