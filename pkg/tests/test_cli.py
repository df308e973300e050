import json
from pathlib import Path

import pytest

from ctrlbench.cli import load_plan, run_command

REPO = Path(__file__).resolve().parent.parent
DEVICES = REPO / "demos" / "devices"
GOLDEN_CHART = Path(__file__).resolve().parent / "data" / "chart_golden.txt"


@pytest.fixture
def spec_file(tmp_path):
    spec = {
        "task": "acquisition",
        "amplitudes": [10, 30, 70, 150],
        "widths": [10],
        "reps_per_block": 5,
        "blocks": 2,
        "seed": 7,
        "device": "mouse",
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return path


def params_file(tmp_path, name, b, noise=0.0, seed=1):
    doc = {"a": 0.2, "b": b, "noise_sd": noise, "seed": seed,
           "device": {"name": name, "dimensions": []}}
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(doc))
    return path


class TestPlanCommand:
    def test_writes_plan(self, tmp_path, spec_file, capsys):
        out = tmp_path / "plan.ndjson"
        assert run_command(["plan", "--spec", str(spec_file), "--out", str(out)]) == 0
        plan = load_plan(out)
        assert len(plan.trials) == 40
        assert "40 trials" in capsys.readouterr().out

    def test_reproducible_bytes(self, tmp_path, spec_file):
        out1, out2 = tmp_path / "p1.ndjson", tmp_path / "p2.ndjson"
        run_command(["plan", "--spec", str(spec_file), "--out", str(out1)])
        run_command(["plan", "--spec", str(spec_file), "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_missing_spec_file(self, tmp_path, capsys):
        code = run_command(["plan", "--spec", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")])
        assert code != 0
        assert "missing file" in capsys.readouterr().err

    def test_malformed_spec(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{]")
        code = run_command(["plan", "--spec", str(bad), "--out", str(tmp_path / "o")])
        assert code != 0
        assert "error" in capsys.readouterr().err


class TestSimulateFitPipeline:
    def test_noiseless_recovery(self, tmp_path, spec_file, capsys):
        plan_path = tmp_path / "plan.ndjson"
        log_path = tmp_path / "session.ndjson"
        run_command(["plan", "--spec", str(spec_file), "--out", str(plan_path)])
        params = params_file(tmp_path, "mouse", b=0.1)
        assert run_command(["simulate", "--plan", str(plan_path), "--params", str(params),
                            "--out", str(log_path)]) == 0
        assert run_command(["fit", "--log", str(log_path), "--model", "fitts",
                            "--out", str(tmp_path / "fit.json")]) == 0
        fit = json.loads((tmp_path / "fit.json").read_text())
        assert abs(fit["a"] - 0.2) < 1e-9
        assert abs(fit["b"] - 0.1) < 1e-9
        assert fit["ip"] == pytest.approx(10.0, abs=1e-6)

    def test_steering_fit(self, tmp_path):
        spec = {
            "task": "steering",
            "paths": [{"preset": "straight", "length": 200, "width": 10},
                      {"preset": "circle", "radius": 50, "width": 5}],
            "seed": 3,
            "device": "pen",
        }
        spec_path = tmp_path / "steer.json"
        spec_path.write_text(json.dumps(spec))
        plan_path = tmp_path / "plan.ndjson"
        log_path = tmp_path / "log.ndjson"
        run_command(["plan", "--spec", str(spec_path), "--out", str(plan_path)])
        params = params_file(tmp_path, "pen", b=0.05)
        run_command(["simulate", "--plan", str(plan_path), "--params", str(params),
                     "--out", str(log_path)])
        assert run_command(["fit", "--log", str(log_path), "--model", "steering",
                            "--out", str(tmp_path / "fit.json")]) == 0
        fit = json.loads((tmp_path / "fit.json").read_text())
        assert fit["b"] == pytest.approx(0.05, rel=1e-3)

    def test_simulate_reproducible(self, tmp_path, spec_file):
        plan_path = tmp_path / "plan.ndjson"
        run_command(["plan", "--spec", str(spec_file), "--out", str(plan_path)])
        params = params_file(tmp_path, "mouse", b=0.1, noise=0.02, seed=9)
        l1, l2 = tmp_path / "a.ndjson", tmp_path / "b.ndjson"
        run_command(["simulate", "--plan", str(plan_path), "--params", str(params), "--out", str(l1)])
        run_command(["simulate", "--plan", str(plan_path), "--params", str(params), "--out", str(l2)])
        assert l1.read_bytes() == l2.read_bytes()


class TestReportCommand:
    def test_two_device_report(self, tmp_path, spec_file, capsys):
        plan_path = tmp_path / "plan.ndjson"
        run_command(["plan", "--spec", str(spec_file), "--out", str(plan_path)])
        logs = []
        for name, b in (("fast", 0.1), ("slow", 0.2)):
            log = tmp_path / f"{name}.ndjson"
            run_command(["simulate", "--plan", str(plan_path),
                         "--params", str(params_file(tmp_path, name, b)), "--out", str(log)])
            logs.append(str(log))
        out = tmp_path / "report.json"
        assert run_command(["report", "--logs", *logs, "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "fast > slow" in text
        doc = json.loads(out.read_text())
        ips = {c["device"]: c["fit"]["ip"] for c in doc["cells"]}
        assert ips["fast"] == pytest.approx(10.0, abs=1e-6)
        assert ips["slow"] == pytest.approx(5.0, abs=1e-6)

    def test_report_byte_identical_across_runs(self, tmp_path, spec_file):
        plan_path = tmp_path / "plan.ndjson"
        run_command(["plan", "--spec", str(spec_file), "--out", str(plan_path)])
        log = tmp_path / "one.ndjson"
        run_command(["simulate", "--plan", str(plan_path),
                     "--params", str(params_file(tmp_path, "one", 0.1)), "--out", str(log)])
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        run_command(["report", "--logs", str(log), "--out", str(r1)])
        run_command(["report", "--logs", str(log), "--out", str(r2)])
        assert r1.read_bytes() == r2.read_bytes()


class TestChartCommand:
    def test_matches_golden_file(self, tmp_path):
        out = tmp_path / "chart.txt"
        code = run_command(["chart",
                            "--devices", str(DEVICES / "mouse.json"), str(DEVICES / "fader_box.json"),
                            "--out", str(out)])
        assert code == 0
        assert out.read_bytes() == GOLDEN_CHART.read_bytes()

    def test_byte_identical_across_runs(self, tmp_path):
        o1, o2 = tmp_path / "c1.txt", tmp_path / "c2.txt"
        for out in (o1, o2):
            run_command(["chart", "--devices", str(DEVICES / "fader_box.json"),
                         str(DEVICES / "mouse.json"), "--out", str(out)])
        assert o1.read_bytes() == o2.read_bytes()

    def test_svg_output(self, tmp_path):
        out = tmp_path / "chart.svg"
        run_command(["chart", "--devices", str(DEVICES / "mouse.json"),
                     "--format", "svg", "--out", str(out)])
        assert out.read_text().startswith("<svg")


class TestUsage:
    def test_unknown_subcommand(self, capsys):
        assert run_command(["transmogrify"]) != 0
        assert "usage" in capsys.readouterr().err.lower()

    def test_no_subcommand(self, capsys):
        assert run_command([]) != 0

    def test_data_dir_default(self, tmp_path, spec_file, monkeypatch, capsys):
        monkeypatch.setenv("CTRLBENCH_DATA_DIR", str(tmp_path / "data"))
        assert run_command(["plan", "--spec", str(spec_file)]) == 0
        assert (tmp_path / "data" / "plan.ndjson").exists()
