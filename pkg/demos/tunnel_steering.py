"""Tunnel (steering) tasks: path difficulty, simulated traversal, and
compliance checking.

Run with: python3 demos/tunnel_steering.py
"""

import math

from ctrlbench import (
    Arc,
    PathSpec,
    Straight,
    simulate_steering,
    steering_compliance,
    steering_difficulty,
)

print("=" * 70)
print("1. Difficulty is the integral of ds/W(s) along the tunnel")
print("=" * 70)
tunnels = {
    "straight 200 x 10": PathSpec.straight(200, 10),
    "straight 200 x 20": PathSpec.straight(200, 20),
    "full circle R=50 W=5": PathSpec.circle(50, 5),
    "narrowing 100: 20 -> 10": PathSpec.straight_linear_width(100, 20, 10),
    "S-shape mixed widths": PathSpec(
        (Straight(80), Arc(30, math.pi), Straight(80), Arc(30, -math.pi)),
        ((0.0, 14.0), (0.5, 6.0), (1.0, 14.0)),
    ),
}
for name, path in tunnels.items():
    print(f"   {name:<26} length {path.total_length():7.1f}  "
          f"difficulty {steering_difficulty(path):7.2f}")

print()
print("=" * 70)
print("2. A simulated performer paces itself by the local width")
print("=" * 70)
tau = 0.05  # seconds per unit of difficulty
print(f"speed model: v(s) = W(s)/tau with tau={tau}")
for name in ("straight 200 x 10", "full circle R=50 W=5"):
    path = tunnels[name]
    record = simulate_steering(path, tau)
    predicted = tau * steering_difficulty(path)
    print(f"   {name:<26} completion {record.samples[-1].t:6.3f} s "
          f"(tau x difficulty = {predicted:6.3f} s)")

print()
print("=" * 70)
print("3. Compliance: did the trajectory stay inside the tunnel?")
print("=" * 70)
path = tunnels["straight 200 x 10"]
clean = simulate_steering(path, tau)
out = steering_compliance(clean, path)
print(f"   centerline run: completed={out.completed} crossings={out.crossings} "
      f"time={out.time:.3f} s")

# now push the trajectory out of the tunnel for a stretch
from ctrlbench import Sample, TrialRecord  # noqa: E402

wobbly_samples = []
for s in clean.samples:
    x, y = s.values
    if 60 < x < 90:
        y += 8.0  # excursion beyond the 5-unit half width
    wobbly_samples.append(Sample(s.t, (x, y)))
wobbly = TrialRecord("wobbly", 0.0, tuple(wobbly_samples))
out = steering_compliance(wobbly, path)
print(f"   wobbly run:     completed={out.completed} crossings={out.crossings} "
      f"time={out.time:.3f} s")
