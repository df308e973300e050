"""Acceptance gate: one test per release criterion, each printing a
pass/fail line (run with `pytest tests/test_acceptance.py -v -s`).

Tolerances are pinned here and nowhere else; simulated performers feed the
same ingestion path a live UI would, so the whole suite runs headless.
"""

import json
import math
from pathlib import Path

from ctrlbench.battery import generate_musical_battery
from ctrlbench.cli import run_command
from ctrlbench.laws import (
    LawParams,
    Observation,
    fit_linear_law,
    fit_meyer,
    fitts_id,
    meyer_time,
)
from ctrlbench.metrics import (
    explorability_score,
    learnability_fit,
    movement_time,
    timing_deviation,
)
from ctrlbench.paths import PathSpec, steering_difficulty
from ctrlbench.session import Session, export_log, import_log
from ctrlbench.simulate import (
    SimConfig,
    simulate_acquisition,
    simulate_rhythm,
    simulate_steering,
)
from ctrlbench.taxonomy import (
    DeviceDescriptor,
    SenseDimension,
    TaskStructure,
    build_chart,
    load_device,
    match_device_to_task,
)

REPO = Path(__file__).resolve().parent.parent
GOLDEN_CHART = Path(__file__).resolve().parent / "data" / "chart_golden.txt"


def check(name: str, ok: bool) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    assert ok, name


def test_fitts_id_table():
    ok = all(
        abs(fitts_id(ratio, 1.0) - bits) < 1e-12
        for ratio, bits in [(1, 1.0), (3, 2.0), (7, 3.0), (15, 4.0)]
    )
    check("Fitts ID table: A/W in {1,3,7,15} -> {1,2,3,4} bits (<1e-12)", ok)


def test_steering_integral_closed_forms():
    cases = [
        (PathSpec.straight(200, 10), 20.0),
        (PathSpec.circle(50, 5), 2 * math.pi * 50 / 5),
        (PathSpec.straight_linear_width(100, 10, 20), 100 / 10 * math.log(2)),
    ]
    ok = all(
        abs(steering_difficulty(path) - expected) / expected < 1e-6
        for path, expected in cases
    )
    check("Steering integral matches closed forms (<1e-6 relative)", ok)


def _acquisition_observations(cfg, amplitudes, width=10.0):
    observations = []
    for i, amplitude in enumerate(amplitudes):
        per_condition = SimConfig(cfg.a, cfg.b, cfg.n, cfg.noise_sd,
                                  cfg.seed + i, cfg.repetitions, cfg.sample_rate)
        for record in simulate_acquisition(per_condition, amplitude, width):
            outcome = movement_time(record, (amplitude - width / 2, amplitude + width / 2))
            observations.append(Observation(fitts_id(amplitude, width), outcome.mt))
    return observations


def test_parameter_recovery_noiseless():
    cfg = SimConfig(a=0.2, b=0.1, repetitions=20)
    fit = fit_linear_law(_acquisition_observations(cfg, (10.0, 30.0, 70.0, 150.0)))
    ok = (
        abs(fit.params.a - 0.2) < 1e-9
        and abs(fit.params.b - 0.1) < 1e-9
        and fit.r_squared > 1.0 - 1e-12
        and abs(fit.ip - 10.0) < 1e-6
    )
    check("Noiseless recovery: a=0.2, b=0.1 (<1e-9), R^2=1, ip=10 bits/s", ok)


def test_parameter_recovery_noisy():
    cfg = SimConfig(a=0.2, b=0.1, noise_sd=0.02, seed=1000, repetitions=50)
    fit = fit_linear_law(_acquisition_observations(cfg, (10.0, 30.0, 70.0, 150.0, 310.0)))
    ok = abs(fit.params.b - 0.1) <= 0.1 * 0.1 and fit.r_squared > 0.9
    check("Noisy recovery (sd=0.02, 5x50, fixed seed): b within 10%, R^2>0.9", ok)


def test_meyer_recovery():
    true = LawParams(0.05, 0.02, 3)
    obs = [Observation(r, meyer_time(true, r)) for r in (2, 4, 8, 16, 32)]
    fit = fit_meyer(obs, n_max=10)
    linear_obs = [Observation(r, 0.1 + 0.03 * r) for r in (1.0, 2.0, 4.0, 8.0)]
    via_meyer = fit_meyer(linear_obs, n_max=1)
    via_linear = fit_linear_law(linear_obs)
    ok = (
        fit.params.n == 3
        and fit.sse < 1e-18
        and via_meyer.params.a == via_linear.params.a
        and via_meyer.params.b == via_linear.params.b
        and via_meyer.sse == via_linear.sse
    )
    check("Meyer recovery: n=3 with sse<1e-18; n_max=1 reproduces linear fit", ok)


def test_steering_simulation_consistency():
    presets = [
        (PathSpec.straight(200, 10), 0.05),
        (PathSpec.straight(200, 20), 0.05),
        (PathSpec.circle(50, 5), 0.05),
        (PathSpec.straight_linear_width(100, 10, 20), 0.08),
    ]
    ok = True
    for path, tau in presets:
        expected = tau * steering_difficulty(path)
        got = simulate_steering(path, tau).samples[-1].t
        ok = ok and abs(got - expected) / expected < 1e-6
    check("Steering simulation time = tau * difficulty (<1e-6 relative)", ok)


def test_timing_metrics():
    tempo = 120.0
    exact = simulate_rhythm(tempo, 16, 0.0, seed=0)
    scheduled = [k * 60.0 / tempo for k in range(16)]
    clean = timing_deviation(exact, scheduled, 60.0 / tempo)

    sd = 0.015
    noisy_onsets = simulate_rhythm(tempo, 500, sd, seed=77)
    noisy_sched = [k * 60.0 / tempo for k in range(500)]
    noisy = timing_deviation(noisy_onsets, noisy_sched, 60.0 / tempo)
    ok = (
        clean.mean_asynchrony == 0.0
        and clean.sd_asynchrony == 0.0
        and abs(noisy.sd_asynchrony - sd) / sd < 0.20
    )
    check("Timing: sd=0 run exact zeros; sd=0.015 recovered within 20%", ok)


def _pipeline(tmp_path: Path) -> bytes:
    tmp_path.mkdir(parents=True, exist_ok=True)
    spec = {
        "task": "acquisition", "amplitudes": [10, 30, 70, 150], "widths": [10],
        "reps_per_block": 5, "blocks": 2, "seed": 7, "device": "probe",
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    plan_path = tmp_path / "plan.ndjson"
    assert run_command(["plan", "--spec", str(spec_path), "--out", str(plan_path)]) == 0
    logs = []
    for name, b in (("fast", 0.1), ("slow", 0.2)):
        params = tmp_path / f"{name}.json"
        params.write_text(json.dumps({
            "a": 0.2, "b": b, "noise_sd": 0.0, "seed": 1,
            "device": {"name": name, "dimensions": []},
        }))
        log = tmp_path / f"{name}.ndjson"
        assert run_command(["simulate", "--plan", str(plan_path),
                            "--params", str(params), "--out", str(log)]) == 0
        logs.append(str(log))
    report_path = tmp_path / "report.json"
    assert run_command(["report", "--logs", *logs, "--out", str(report_path)]) == 0
    return report_path.read_bytes()


def test_end_to_end_ranking(tmp_path):
    first = _pipeline(tmp_path / "run1")
    second = _pipeline(tmp_path / "run2")
    doc = json.loads(first)
    ips = {c["device"]: c["fit"]["ip"] for c in doc["cells"]}
    ranking = dict((cls, devs) for cls, devs in doc["rankings"])
    ok = (
        abs(ips["fast"] - 10.0) < 1e-6
        and abs(ips["slow"] - 5.0) < 1e-6
        and ranking["acquisition"] == ["fast", "slow"]
        and first == second
    )
    check("End-to-end ranking: ip 10 vs 5, fast first, report byte-identical", ok)


def test_log_roundtrip_every_message_kind():
    device = DeviceDescriptor("probe")
    plan = generate_musical_battery("rhythm", {"count": 2}, tempi=(120,), reps_per_block=2,
                                    seed=0, device="probe")
    session = Session("s-all", device, plan)
    session.ingest({"v": 1, "type": "trial_start", "trial": "t-0000", "t": 0.0})
    session.ingest({"v": 1, "type": "sample", "trial": "t-0000", "t": 0.01, "values": [0.5, 1.5]})
    session.ingest({"v": 1, "type": "event", "trial": "t-0000", "t": 0.02,
                    "kind": "note_on", "pitch": 60.0, "velocity": 101.0})
    session.ingest({"v": 1, "type": "event", "trial": "t-0000", "t": 0.40,
                    "kind": "note_off", "pitch": 60.0})
    session.ingest({"v": 1, "type": "event", "trial": "t-0000", "t": 0.55,
                    "kind": "selection", "position": 3.25})
    session.ingest({"v": 1, "type": "trial_end", "trial": "t-0000", "t": 0.6})
    session.ingest({"v": 1, "type": "trial_start", "trial": "t-0001", "t": 1.0})
    session.abort_active_trial()
    record = session.close()

    blob = export_log(record)
    restored = import_log(blob)
    ok = (
        restored.trials == record.trials
        and restored.trial_metrics == record.trial_metrics
        and restored.plan == record.plan
        and restored.device == record.device
        and restored.status == record.status
        and export_log(restored) == blob
    )
    check("Log roundtrip: import is inverse of export, re-export byte-identical", ok)


def test_taxonomy_chart_and_matching():
    chart = build_chart([
        load_device(REPO / "demos" / "devices" / "mouse.json"),
        load_device(REPO / "demos" / "devices" / "fader_box.json"),
    ])
    golden_ok = chart.to_text() == GOLDEN_CHART.read_text()

    mouse = DeviceDescriptor("mouse", (
        SenseDimension("delta-position", "linear", "X", "continuous", "ball"),
        SenseDimension("delta-position", "linear", "Y", "continuous", "ball"),
    ))
    sliders = DeviceDescriptor("sliders", (
        SenseDimension("position", "linear", "X", 128, "f1"),
        SenseDimension("position", "linear", "Y", 128, "f2"),
    ))
    integral = TaskStructure(("x", "y"), "integral")
    separable = TaskStructure(("volume", "pan"), "separable")
    table_ok = (
        match_device_to_task(mouse, integral).matched
        and not match_device_to_task(sliders, integral).matched
        and not match_device_to_task(mouse, separable).matched
    )
    check("Taxonomy: chart matches golden file; match truth table holds", golden_ok and table_ok)


def test_learnability_and_explorability():
    times = [2.0 * k ** -0.3 for k in range(1, 6)]
    fit = learnability_fit(times)
    samples = [(x / 4 + 0.125, y / 4 + 0.125) for x in range(4) for y in range(4)]
    score = explorability_score(samples, [(4, 0.0, 1.0), (4, 0.0, 1.0)])
    ok = (
        abs(fit.t1 - 2.0) < 1e-9
        and abs(fit.alpha - 0.3) < 1e-9
        and score.entropy_bits == 4.0
        and score.cells_visited == 16
    )
    check("Learnability (T1=2, alpha=0.3 <1e-9) and entropy 4.0 bits exact", ok)
