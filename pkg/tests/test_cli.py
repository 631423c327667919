"""Command-line verbs, presets, batch files and exit codes."""

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from fmd import cli
from fmd.errors import PrecisionError
from fmd.presets import PRESET_NAMES, preset
from fmd.scenarios import ScenarioResult

APIARY_ARGS = ["--N", "100", "--a1", "25", "--a2", "60", "--pL", "0.1", "--pU", "0.7"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestScenarioVerbs:
    def test_predict_window(self, tmp_path, capsys):
        out = tmp_path / "p.csv"
        code, _, _ = run(capsys, "predict", *APIARY_ARGS, "--completion", "strict", "--out", str(out))
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 101 and list(rows[0]) == ["a", "abscissa", "p_aN", "q_aNp1", "density"]
        for r in rows[25:61]:
            assert float(r["p_aN"]) == int(r["a"]) / 100

    def test_predict_to_stdout(self, capsys):
        code, out, err = run(capsys, "predict", "--assertion", "Pa8[2,5,.1,.7]", "--completion", "weak")
        assert code == 0
        assert out.splitlines()[2].split(",")[2] == "0.10000000000000001"
        assert json.loads(err) == {"N": 8}

    def test_mass_weak_concentrates_near_tenth(self, tmp_path, capsys):
        out = tmp_path / "m.csv"
        assert run(capsys, "mass", *APIARY_ARGS, "--completion", "weak", "--out", str(out))[0] == 0
        rows = read_csv(out)
        x = np.array([float(r["abscissa"]) for r in rows])
        q = np.array([float(r["q_aNp1"]) for r in rows])
        assert abs(x[np.argmax(q)] - 0.1) < 0.02
        assert q[(x > 0.04) & (x < 0.18)].sum() > 0.9

    def test_json_and_log_output(self, tmp_path, capsys):
        out = tmp_path / "m.json"
        assert run(capsys, "mass", *APIARY_ARGS, "--log-output", "--out", str(out))[0] == 0
        doc = json.loads(out.read_text())
        assert "log_q_aNp1" in doc["rows"][0] and doc["meta"]["completion"] == "linear"

    def test_reduce(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        assert run(capsys, "reduce", *APIARY_ARGS, "--M", "10", "--out", str(out))[0] == 0
        assert len(read_csv(out)) == 11

    def test_extend(self, tmp_path, capsys):
        out = tmp_path / "e.csv"
        code, stdout, _ = run(capsys, "extend", *APIARY_ARGS, "--K", "900", "--out", str(out))
        assert code == 0
        assert json.loads(stdout)["extended"].startswith("Pa1000[25,960,")

    def test_limit(self, tmp_path, capsys):
        out = tmp_path / "l.csv"
        code, stdout, _ = run(capsys, "limit", "--N", "1000", "--theta1", ".2", "--theta2", ".6", "--completion", "strict", "--out", str(out))
        assert code == 0
        assert json.loads(stdout)["assertion"] == "Pa1000[200,600,0.1,0.8]"

    def test_limit_with_bounds(self, tmp_path, capsys):
        code, stdout, _ = run(
            capsys, "limit", "--N", "100", "--theta1", ".2", "--theta2", ".6", "--pL", ".05", "--pU", ".9",
            "--out", str(tmp_path / "l.csv"),
        )
        assert code == 0 and json.loads(stdout)["assertion"] == "Pa100[20,60,0.05,0.9]"

    def test_sensitivity_files(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        code, _, _ = run(capsys, "sensitivity", *APIARY_ARGS, "--completion", "weak", "--pU-list", ".75,.83", "--out", str(out))
        assert code == 0
        assert (tmp_path / "s_pU0.75.csv").exists() and (tmp_path / "s_pU0.83.csv").exists()

    def test_geometry(self, capsys):
        code, out, _ = run(capsys, "geometry", "--assertion", "Pa8[2,5,.2,.7]", "--completion", "strict")
        assert code == 0 and out.startswith("n,a,in_window")

    def test_figure(self, tmp_path, capsys):
        png = tmp_path / "f.png"
        assert run(capsys, "mass", *APIARY_ARGS, "--out", str(tmp_path / "m.csv"), "--figure", str(png))[0] == 0
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


class TestVerify:
    def test_theorem3(self, capsys):
        code, out, _ = run(capsys, "verify", "theorem3", *APIARY_ARGS)
        assert code == 0
        dev = float(next(l for l in out.splitlines() if l.startswith("max_deviation")).split(":")[1])
        assert dev < 1e-12

    @pytest.mark.parametrize(
        "argv",
        [
            ["theorem1", "--N", "100"],
            ["theorem2", "--N", "100", "--M", "10", "--q0", "0.3"],
            ["theorem4", "--assertion", "Pa8[2,5,.2,.7]", "--a-star", "5"],
            ["theorem5", "--assertion", "Pa100[25,60,.1,.7]", "--K", "100", "--completion", "strict"],
            ["roundtrip", *APIARY_ARGS],
        ],
    )
    def test_passes(self, capsys, argv):
        code, out, _ = run(capsys, "verify", *argv)
        assert code == 0 and "passed: True" in out

    def test_failure_exit_code(self, capsys, monkeypatch):
        def failing(spec):
            return ScenarioResult(spec, {}, {"theorem": "theorem3"}, [], passed=False)

        monkeypatch.setattr(cli, "run_scenario", failing)
        assert run(capsys, "verify", "theorem3", *APIARY_ARGS)[0] == 1


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["predict", "--N", "8", "--a1", "2", "--a2", "9", "--pL", ".2", "--pU", ".7"],
            ["predict", "--N", "8", "--a1", "2"],
            ["predict"],
            ["predict", "--assertion", "Pa8[2,5,.2,.7]", "--a1", "3"],
            ["predict", "--assertion", "Pa8[2,5,.1,.7]", "--completion", "quartic"],
            ["verify", "theorem4", "--assertion", "Pa8[2,5,.2,.7]", "--a-star", "2"],
            ["verify", "theorem4", "--assertion", "Pa8[2,5,.2,.7]"],
            ["limit", "--N", "4", "--theta1", ".3", "--theta2", ".45"],
            ["limit", "--N", "100", "--theta1", ".2", "--theta2", ".6", "--a1", "20"],
            ["reduce", *APIARY_ARGS, "--M", "500"],
            ["preset", "fig99"],
            ["frobnicate"],
            ["sensitivity", *APIARY_ARGS, "--pU-list", "a,b"],
        ],
    )
    def test_invalid_input_exit_2(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2 and "error" in err

    def test_precision_exit_3(self, capsys, monkeypatch):
        def boom(spec):
            raise PrecisionError("lost precision")

        monkeypatch.setattr(cli, "run_scenario", boom)
        code, _, err = run(capsys, "mass", *APIARY_ARGS)
        assert code == 3 and "precision" in err

    def test_missing_output_dir(self, tmp_path, capsys):
        code, _, _ = run(capsys, "predict", *APIARY_ARGS, "--out", str(tmp_path / "nope" / "p.csv"))
        assert code == 2


class TestBatch:
    def test_runs_lines(self, tmp_path, capsys):
        f = tmp_path / "cmds.txt"
        f.write_text(
            "# comment\n"
            f"predict --assertion Pa8[2,5,.1,.7] --out {tmp_path / 'a.csv'}\n"
            "\n"
            "fmd verify theorem3 --assertion Pa8[2,5,.1,.7]  # trailing comment\n"
        )
        code, out, _ = run(capsys, "batch", str(f))
        assert code == 0 and (tmp_path / "a.csv").exists() and "passed: True" in out

    def test_line_numbered_error(self, tmp_path, capsys):
        f = tmp_path / "cmds.txt"
        f.write_text("verify theorem1 --N 10\n\nmass --N 8 --a1 2\nverify theorem1 --N 20\n")
        code, out, err = run(capsys, "batch", str(f))
        assert code == 2
        assert f"{f}:3:" in err
        assert out.count("theorem: theorem1") == 1

    def test_missing_file(self, tmp_path, capsys):
        assert run(capsys, "batch", str(tmp_path / "absent.txt"))[0] == 2


class TestPresets:
    def test_names(self):
        assert set(PRESET_NAMES) == {"fig1", "fig2-top", "fig2-bottom", "fig3", "fig4", "fig8", "appendix1", "appendix2"}

    def test_fig2_top_contents(self):
        specs = preset("fig2-top").scenarios
        assert [s.completion.value for s in specs] == ["linear", "quartic", "weak", "strict"]
        assert all(str(s.assertion) == "Pa100[25,60,0.1,0.7]" for s in specs)

    def test_appendix1_contents(self):
        (spec,) = preset("appendix1").scenarios
        assert spec.params["pU_list"] == (0.75, 0.79, 0.83)

    def test_fig8_contents(self):
        masses = [s for s in preset("fig8").scenarios if s.action == "mass"]
        assert [(s.assertion.N, s.assertion.a1, s.assertion.a2) for s in masses] == [
            (100, 20, 60),
            (1000, 200, 600),
            (100_000, 20_000, 60_000),
        ]
        assert all((s.assertion.pL, s.assertion.pU) == (0.1, 0.8) for s in masses)

    def test_run_and_deterministic(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("FMD_THREADS", "2")
        first, second = tmp_path / "one", tmp_path / "two"
        assert run(capsys, "preset", "fig2-top", "--out", str(first))[0] == 0
        monkeypatch.setenv("FMD_THREADS", "1")
        assert run(capsys, "preset", "fig2-top", "--out", str(second))[0] == 0
        names = sorted(p.name for p in first.iterdir())
        assert "fig2-top.png" in names and "fig2_top_strict.csv" in names
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_appendix2(self, tmp_path, capsys):
        code, out, _ = run(capsys, "preset", "appendix2", "--out", str(tmp_path))
        assert code == 0 and "p[6,9]=2/3" in out


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "fmd.cli", "verify", "theorem3", "--assertion", "Pa8[2,5,.2,.7]"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and "passed: True" in proc.stdout


def test_help(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--help"])
    assert exc.value.code == 0
