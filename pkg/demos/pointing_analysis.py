"""Pointing-task walkthrough: difficulty, simulated performers, and the
index of performance.

Run with: python3 demos/pointing_analysis.py
"""

import numpy as np

from ctrlbench import (
    Observation,
    SimConfig,
    fit_linear_law,
    fit_meyer,
    fitts_id,
    movement_time,
    simulate_acquisition,
)

print("=" * 70)
print("1. Index of difficulty")
print("=" * 70)
print("Pointing difficulty grows logarithmically with distance/width:")
for amplitude, width in [(10, 10), (30, 10), (70, 10), (150, 10), (150, 2)]:
    bits = fitts_id(amplitude, width)
    print(f"   A={amplitude:>4}  W={width:>3}  ->  {bits:5.2f} bits")

print()
print("=" * 70)
print("2. A simulated performer with known coefficients")
print("=" * 70)
cfg = SimConfig(a=0.2, b=0.1, noise_sd=0.02, seed=42, repetitions=50)
print(f"ground truth: a={cfg.a} s, b={cfg.b} s/bit, gaussian noise sd={cfg.noise_sd} s")

observations = []
for amplitude in (10.0, 30.0, 70.0, 150.0):
    records = simulate_acquisition(cfg, amplitude, 10.0)
    mts = [movement_time(r, (amplitude - 5, amplitude + 5)).mt for r in records]
    difficulty = fitts_id(amplitude, 10.0)
    observations.append(Observation(difficulty, float(np.mean(mts))))
    print(f"   ID={difficulty:.0f} bits: mean mt {np.mean(mts)*1000:6.1f} ms "
          f"over {len(mts)} trials (model {200 + 100*difficulty:.0f} ms)")

print()
print("=" * 70)
print("3. Fitting the pointing law")
print("=" * 70)
fit = fit_linear_law(observations)
print(f"   a = {fit.params.a*1000:.1f} ms   b = {fit.params.b*1000:.1f} ms/bit   "
      f"r^2 = {fit.r_squared:.4f}")
print(f"   index of performance ip = 1/b = {fit.ip:.2f} bits/s")
print("   (ip is device-independent: compare controllers by this number)")

print()
print("=" * 70)
print("4. Sub-movement model: how many corrections does the performer make?")
print("=" * 70)
from ctrlbench import LawParams, meyer_time  # noqa: E402

true = LawParams(0.05, 0.02, 3)
ratios = (2.0, 4.0, 8.0, 16.0, 32.0)
sub_obs = [Observation(r, meyer_time(true, r)) for r in ratios]
meyer = fit_meyer(sub_obs, n_max=10)
print(f"   data generated with n=3 sub-movements; grid search recovers "
      f"n={meyer.params.n} (sse={meyer.sse:.2e})")
