"""Command line behaviour: output shapes, exit codes, config files, determinism."""

import json
import math
import subprocess
import sys

import pytest

from trigas.cli import main
from trigas.model import h_alpha
from trigas.sampler import beta_threshold, peierls_series_bound


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDecompose:
    def test_triangle_input_golden(self, capsys):
        code, out, err = run(
            ["decompose", "--triangles", "0:1,18:18,35:36"], capsys
        )
        assert code == 0
        assert err == ""
        record = json.loads(out)
        assert record["c"] == 15.0
        assert record["triangles"] == [[0, 1], [18, 18], [35, 36]]
        assert record["contours"] == [
            {"triangles": [[0, 1], [35, 36]], "mass": 4, "span": [0, 36]},
            {"triangles": [[18, 18]], "mass": 1, "span": [18, 18]},
        ]

    def test_spin_input(self, capsys):
        code, out, _ = run(["decompose", "--origin", "0", "++--++"], capsys)
        assert code == 0
        record = json.loads(out)
        assert record["triangles"] == [[2, 3]]
        assert record["contours"][0]["mass"] == 2

    def test_all_plus_has_no_contours(self, capsys):
        code, out, _ = run(["decompose", "--origin", "0", "++++"], capsys)
        assert code == 0
        record = json.loads(out)
        assert record["triangles"] == []
        assert record["contours"] == []

    def test_rejects_both_inputs(self, capsys):
        code, _, err = run(
            ["decompose", "--triangles", "0:0", "++-"], capsys
        )
        assert code == 2
        assert "error:" in err

    def test_rejects_missing_input(self, capsys):
        code, _, err = run(["decompose"], capsys)
        assert code == 2
        assert "error:" in err

    def test_rejects_bad_spin_characters(self, capsys):
        code, _, err = run(["decompose", "+x-"], capsys)
        assert code == 2
        assert "error:" in err

    def test_rejects_malformed_triangles(self, capsys):
        assert run(["decompose", "--triangles", "3:"], capsys)[0] == 2
        assert run(["decompose", "--triangles", "5:3"], capsys)[0] == 2

    def test_rejects_nonpositive_scale(self, capsys):
        code, _, err = run(
            ["decompose", "--triangles", "0:0", "--c", "0"], capsys
        )
        assert code == 2
        assert "positive" in err

    def test_missing_command_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2


class TestTree:
    def test_two_contours(self, capsys):
        code, out, _ = run(["tree", "--triangles", "0:1,18:18,35:36"], capsys)
        assert code == 0
        record = json.loads(out)
        entries = record["contours"]
        assert len(entries) == 2
        assert all(e["valid"] for e in entries)
        assert all(e["violations"] == [] for e in entries)
        assert entries[0]["tree"]["kind"] == "black"
        assert entries[1]["tree"]["kind"] == "white"
        assert entries[1]["steps"] == 0

    def test_single_triangle_root_is_white(self, capsys):
        code, out, _ = run(["tree", "--triangles", "4:9"], capsys)
        assert code == 0
        record = json.loads(out)
        tree = record["contours"][0]["tree"]
        assert tree["kind"] == "white"
        assert tree["triangle"] == [4, 9]


class TestWbound:
    def test_json_fields(self, capsys):
        code, out, _ = run(
            ["wbound", "--alpha", "0.5", "--j1", "10", "--l-max", "50"], capsys
        )
        assert code == 0
        record = json.loads(out)
        assert record["violations"] == 0
        assert record["first_violation"] is None
        assert record["argmin_length"] == 1
        assert record["minimal_j1"] == pytest.approx(1.6981617863123943)

    def test_csv_table(self, capsys):
        code, out, _ = run(
            ["wbound", "--alpha", "0.5", "--j1", "10", "--l-max", "5",
             "--format", "csv"],
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "# alpha=0.5 j1=10.0 l_max=5"
        assert lines[1] == "length,w,floor,slack"
        assert len(lines) == 7
        first = lines[2].split(",")
        assert first[0] == "1"
        w, floor, slack = (float(v) for v in first[1:])
        assert slack == pytest.approx(w - floor, abs=1e-12)


class TestEntropy:
    def test_mass_two_closed_form(self, capsys):
        code, out, _ = run(["entropy", "--m", "2"], capsys)
        assert code == 0
        record = json.loads(out)
        b = 8.0
        want = math.exp(-b * h_alpha(2, 0.0)) + 15 * math.exp(
            -2 * b * h_alpha(1, 0.0)
        )
        assert record["g_total"] == pytest.approx(want, rel=1e-12)
        assert record["configurations"] == 16
        assert record["ok"] is True

    def test_rejects_bad_mass(self, capsys):
        code, _, err = run(["entropy", "--m", "0"], capsys)
        assert code == 2
        assert "error:" in err


class TestConvexity:
    def test_clean_scan(self, capsys):
        code, out, _ = run(
            ["convexity", "--alpha", "0.5", "--a", "1", "--b", "10",
             "--n-max", "2", "--x-max", "20"],
            capsys,
        )
        assert code == 0
        record = json.loads(out)
        assert record["violations"] == 0
        assert record["argmin"] == [1, 1]

    def test_rejects_bad_coefficients(self, capsys):
        code, _, err = run(
            ["convexity", "--a", "10", "--b", "10"], capsys
        )
        assert code == 2
        assert "error:" in err


SAMPLE_ARGS = [
    "sample", "--window", "6", "--beta", "0.5", "--alpha", "0.0",
    "--j1", "1.0", "--sweeps", "50", "--burn-in", "5", "--seed", "3",
]


class TestSample:
    def test_report_fields(self, capsys):
        code, out, _ = run(SAMPLE_ARGS, capsys)
        assert code == 0
        record = json.loads(out)
        assert record["window"] == 6
        assert record["inclusion_violations"] == 0
        assert 0.0 <= record["spin_estimate"] <= 1.0
        assert record["event_estimate"] >= record["spin_estimate"]
        assert "series_value" not in record

    def test_byte_identical_reruns(self, capsys):
        _, first, _ = run(SAMPLE_ARGS, capsys)
        _, second, _ = run(SAMPLE_ARGS, capsys)
        assert first == second

    def test_zeta_adds_series_block(self, capsys):
        code, out, _ = run(SAMPLE_ARGS + ["--zeta", "30.0"], capsys)
        assert code == 0
        record = json.loads(out)
        oracle = peierls_series_bound(0.5, 30.0, 0.0)
        assert record["series_value"] == pytest.approx(oracle.value, rel=1e-12)
        assert record["series_converged"] is True
        assert record["series_below_half"] == oracle.below_half


class TestPeierlsSweep:
    def test_csv_sweep(self, capsys):
        code, out, _ = run(
            ["peierls-sweep", "--alpha", "0.0", "--zeta", "2.0",
             "--beta-min", "3", "--beta-max", "5", "--steps", "3"],
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "# alpha=0.0 zeta=2.0 beta_min=3.0 beta_max=5.0 steps=3"
        assert lines[1] == "beta,kappa,value,remainder,converged,below_half"
        assert len(lines) == 5
        rows = [ln.split(",") for ln in lines[2:]]
        assert [r[0] for r in rows] == ["3.0", "4.0", "5.0"]
        assert all(r[4] == "1" for r in rows)

    def test_single_beta_json(self, capsys):
        code, out, _ = run(
            ["peierls-sweep", "--series-beta", "6", "--alpha", "0.0",
             "--zeta", "2.0"],
            capsys,
        )
        assert code == 0
        record = json.loads(out)
        oracle = peierls_series_bound(6.0, 2.0, 0.0)
        assert record["kappa"] == 6.0
        assert record["value"] == pytest.approx(oracle.value, rel=1e-12)
        assert record["below_half"] is True

    def test_threshold_json(self, capsys):
        code, out, _ = run(
            ["peierls-sweep", "--threshold", "--alpha", "0.5", "--zeta", "2.0"],
            capsys,
        )
        assert code == 0
        record = json.loads(out)
        assert record["beta_star"] == pytest.approx(
            beta_threshold(2.0, 0.5), rel=1e-12
        )

    def test_rejects_bad_range(self, capsys):
        code, _, err = run(
            ["peierls-sweep", "--beta-min", "5", "--beta-max", "3"], capsys
        )
        assert code == 2
        assert "beta-max" in err
        assert run(["peierls-sweep", "--steps", "1"], capsys)[0] == 2


class TestConfigFile:
    def test_values_come_from_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# single evaluation\n"
            "series-beta = 6.0\n"
            "zeta = 2.0\n"
            "\n"
            "alpha = 0.0\n"
        )
        code, out, _ = run(
            ["peierls-sweep", "--config", str(cfg)], capsys
        )
        assert code == 0
        record = json.loads(out)
        assert record["beta"] == 6.0
        assert record["alpha"] == 0.0

    def test_explicit_flag_beats_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("series-beta=6.0\nzeta=2.0\nalpha=0.5\n")
        code, out, _ = run(
            ["peierls-sweep", "--config", str(cfg), "--alpha", "0.0"], capsys
        )
        assert code == 0
        assert json.loads(out)["alpha"] == 0.0

    def test_boolean_option_from_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("threshold=true\nzeta=2.0\nalpha=0.5\n")
        code, out, _ = run(["peierls-sweep", "--config", str(cfg)], capsys)
        assert code == 0
        assert "beta_star" in json.loads(out)

    def test_unknown_key_fails(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("betamax=5\n")
        code, _, err = run(["peierls-sweep", "--config", str(cfg)], capsys)
        assert code == 2
        assert "unknown option" in err

    def test_missing_file_fails(self, capsys):
        code, _, err = run(
            ["peierls-sweep", "--config", "/nonexistent/x.cfg"], capsys
        )
        assert code == 2
        assert "error:" in err


class TestOutputRouting:
    def test_output_file(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv("TRIGAS_OUTPUT_DIR", raising=False)
        target = tmp_path / "res.json"
        code, out, _ = run(
            ["decompose", "--triangles", "0:0", "--output", str(target)], capsys
        )
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["contours"][0]["mass"] == 1

    def test_relative_output_lands_in_env_dir(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("TRIGAS_OUTPUT_DIR", str(tmp_path))
        code, _, _ = run(
            ["decompose", "--triangles", "0:0", "--output", "nested/res.json"],
            capsys,
        )
        assert code == 0
        assert (tmp_path / "nested" / "res.json").exists()

    def test_absolute_output_ignores_env_dir(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("TRIGAS_OUTPUT_DIR", str(tmp_path / "elsewhere"))
        target = tmp_path / "direct.json"
        code, _, _ = run(
            ["decompose", "--triangles", "0:0", "--output", str(target)], capsys
        )
        assert code == 0
        assert target.exists()
        assert not (tmp_path / "elsewhere").exists()

    def test_dash_means_stdout(self, capsys):
        code, out, _ = run(
            ["decompose", "--triangles", "0:0", "--output", "-"], capsys
        )
        assert code == 0
        assert json.loads(out)["triangles"] == [[0, 0]]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "trigas", "decompose", "--triangles", "0:0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["contours"][0]["span"] == [0, 0]
