"""End-to-end comparison of two simulated controllers: plan a battery,
simulate performances, ingest them as sessions, and rank the devices by
index of performance.

Run with: python3 demos/device_comparison.py
"""

from ctrlbench import (
    DeviceDescriptor,
    SenseDimension,
    SimConfig,
    comparison_report,
    export_log,
    generate_acquisition_battery,
    generate_musical_battery,
    session_from_records,
    simulate_plan,
)

print("=" * 70)
print("1. One battery, two (simulated) controllers")
print("=" * 70)
performers = {
    "glide-pad": SimConfig(a=0.25, b=0.09, noise_sd=0.015, seed=101),
    "stiff-knob": SimConfig(a=0.18, b=0.21, noise_sd=0.015, seed=202),
}
descriptors = {
    "glide-pad": DeviceDescriptor("glide-pad", (
        SenseDimension("position", "linear", "X", "continuous", "surface"),
        SenseDimension("position", "linear", "Y", "continuous", "surface"),
    )),
    "stiff-knob": DeviceDescriptor("stiff-knob", (
        SenseDimension("position", "rotary", "rZ", 128, "knob"),
    )),
}

sessions = []
for name, cfg in performers.items():
    plan = generate_acquisition_battery(
        [10, 30, 70, 150], [10], reps_per_block=10, blocks=4, seed=77, device=name)
    records = simulate_plan(plan, cfg)
    session = session_from_records(f"demo-{name}", descriptors[name], plan, records)
    sessions.append(session)
    print(f"   {name:<11} {len(records)} trials simulated "
          f"(true b = {cfg.b} s/bit -> expect ip near {1/cfg.b:.1f} bits/s)")

print()
print("=" * 70)
print("2. Rhythm battery for the same controllers")
print("=" * 70)
for i, (name, cfg) in enumerate(performers.items()):
    plan = generate_musical_battery(
        "rhythm", {"count": 32}, tempi=(90, 150), reps_per_block=2, blocks=2,
        seed=5, device=name)
    jitter = SimConfig(noise_sd=0.008 + 0.008 * i, seed=cfg.seed)
    records = simulate_plan(plan, jitter)
    sessions.append(session_from_records(f"demo-{name}-rhythm", descriptors[name], plan, records))
    print(f"   {name:<11} rhythm jitter sd {jitter.noise_sd*1000:.0f} ms")

print()
print("=" * 70)
print("3. The comparison report")
print("=" * 70)
report = comparison_report(sessions)
print(report.to_text())

log_bytes = export_log(sessions[0])
n_records = log_bytes.count(b"\n")
print(f"(each session serializes to the shared log format; first one is "
      f"{len(log_bytes)} bytes over {n_records} records)")
