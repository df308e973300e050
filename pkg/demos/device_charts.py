"""Controller taxonomy: the sensed-dimension chart and the integral /
separable matching rule.

Run with: python3 demos/device_charts.py
"""

from pathlib import Path

from ctrlbench import (
    TaskStructure,
    build_chart,
    classify_control_structure,
    degrees_of_freedom,
    load_device,
    match_device_to_task,
)

HERE = Path(__file__).resolve().parent

devices = [load_device(p) for p in sorted((HERE / "devices").glob("*.json"))]

print("=" * 70)
print("1. The chart of controllers: what does each device sense, and where?")
print("=" * 70)
chart = build_chart(devices)
print(chart.to_text())

svg_path = HERE / "chart.svg"
svg_path.write_text(chart.to_svg())
print(f"(vector rendering written to {svg_path})")

print()
print("=" * 70)
print("2. Degrees of freedom and control structure")
print("=" * 70)
for device in devices:
    structure = classify_control_structure(device)
    print(f"   {device.name:<14} {degrees_of_freedom(device)} dof   {structure.summary}")

print()
print("=" * 70)
print("3. Matching device structure to task structure")
print("=" * 70)
tasks = [
    TaskStructure(("pitch", "loudness"), "integral"),
    TaskStructure(("volume-ch1", "volume-ch2"), "separable"),
]
for task in tasks:
    print(f"   task {task.attributes} ({task.structure}):")
    for device in devices:
        if len(task.attributes) > degrees_of_freedom(device):
            print(f"      {device.name:<14} lacks capacity")
            continue
        report = match_device_to_task(device, task)
        verdict = "match" if report.matched else f"mismatch ({report.reason})"
        print(f"      {device.name:<14} {verdict}")
