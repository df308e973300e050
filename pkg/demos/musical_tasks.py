"""The musical task battery: expansion, timing precision, learnability,
and explorability.

Run with: python3 demos/musical_tasks.py
"""

import numpy as np

from ctrlbench import (
    explorability_score,
    generate_musical_battery,
    learnability_fit,
    pitch_target,
    simulate_rhythm,
    timing_deviation,
)

print("=" * 70)
print("1. Expanding musical task kinds into concrete trials")
print("=" * 70)
for kind, params in [
    ("scale", {"root": 60}),
    ("arpeggio", {"root": 60}),
    ("trill", {"pitch": 67, "rate": 8, "count": 8}),
    ("phrase-contour", {"contour": "random", "length": 6}),
    ("feature-modulation", {"preset": "circle-of-four"}),
    ("synchronization", {"ratio_a": 2, "ratio_b": 3}),
]:
    plan = generate_musical_battery(kind, params, tempi=(120,), seed=9)
    task = plan.trials[0]
    melody = ", ".join(f"{p:g}" for p in task.melody[:8])
    print(f"   {kind:<19} {len(task.onsets):>3} onsets   melody: {melody}")

print()
print("=" * 70)
print("2. Timing precision across tempi (simulated jittery performer)")
print("=" * 70)
sd_true = 0.012
for tempo in (60.0, 120.0, 180.0):
    onsets = simulate_rhythm(tempo, 200, sd_true, seed=4)
    scheduled = [k * 60.0 / tempo for k in range(200)]
    report = timing_deviation(onsets, scheduled, 60.0 / tempo)
    print(f"   {tempo:5.0f} bpm: mean asynchrony {report.mean_asynchrony*1000:+6.2f} ms   "
          f"sd {report.sd_asynchrony*1000:5.2f} ms   "
          f"matched {report.matched}/{report.matched + report.missed}")
print(f"   (true jitter sd: {sd_true*1000:.1f} ms)")

print()
print("=" * 70)
print("3. Learnability: block means follow a power law of practice")
print("=" * 70)
block_means = [2.0 * k ** -0.3 for k in range(1, 7)]
print("   block mean times:", ", ".join(f"{t:.3f}" for t in block_means))
fit = learnability_fit(block_means)
print(f"   fitted T1={fit.t1:.3f} s, learning exponent alpha={fit.alpha:.3f}, "
      f"r^2={fit.r_squared:.4f}")

print()
print("=" * 70)
print("4. Explorability: how much of the feature space was visited?")
print("=" * 70)
rng = np.random.default_rng(3)
narrow = np.column_stack([rng.uniform(0.4, 0.6, 500), rng.uniform(0.4, 0.6, 500)])
wide = np.column_stack([rng.uniform(0.0, 1.0, 500), rng.uniform(0.0, 1.0, 500)])
grid = [(8, 0.0, 1.0), (8, 0.0, 1.0)]
for label, samples in (("timid performer", narrow), ("explorer", wide)):
    score = explorability_score(samples.tolist(), grid)
    print(f"   {label:<16} coverage {score.coverage:5.1%}   "
          f"entropy {score.entropy_bits:.2f} bits of {np.log2(score.total_cells):.0f}")

print()
print("=" * 70)
print("5. Pitch acquisition maps onto the pointing law")
print("=" * 70)
target = pitch_target(440.0, 25.0, start_hz=261.63)
print(f"   target 440 Hz +/- 25 cents -> accept [{target.lo:.2f}, {target.hi:.2f}] Hz")
print(f"   from middle C: amplitude {target.amplitude_cents:.0f} cents, "
      f"width {target.width_cents:.0f} cents")
