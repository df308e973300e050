"""Synthetic performers that obey the movement laws with known parameters.

These generators stand in for human subjects: they emit TrialRecords whose
schema is indistinguishable from captured data, so the whole pipeline
(ingestion, metrics, fitting, reporting) can be verified against ground
truth. All randomness flows through the pinned generator in `rng`, keyed
by (seed, trial index), so a configuration reproduces byte-identical data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .battery import AcquisitionTask, MusicalTask, SteeringTask, TrialPlan
from .errors import DomainError
from .laws import fitts_id
from .metrics import Event, Sample, TrialRecord
from .paths import PathSpec, steering_difficulty
from .rng import SplitMix64, derive_seed


@dataclass(frozen=True)
class SimConfig:
    """Ground-truth law coefficients plus noise and sampling settings."""

    a: float = 0.0
    b: float = 0.1
    n: int | None = None
    noise_sd: float = 0.0
    seed: int = 0
    repetitions: int = 1
    sample_rate: float = 125.0

    def __post_init__(self):
        if self.noise_sd < 0:
            raise DomainError(f"noise sd must be >= 0, got {self.noise_sd}")
        if self.sample_rate <= 0:
            raise DomainError(f"sample rate must be > 0, got {self.sample_rate}")
        if self.repetitions < 1:
            raise DomainError(f"repetitions must be >= 1, got {self.repetitions}")


def _ramp_samples(mt: float, amplitude: float, rate: float) -> tuple[Sample, ...]:
    """Linear position ramp 0 -> amplitude sampled at `rate`, final sample
    exactly at mt."""
    n = int(mt * rate)
    ts = [k / rate for k in range(n + 1) if k / rate < mt]
    samples = [Sample(t, (amplitude * (t / mt),)) for t in ts]
    samples.append(Sample(mt, (amplitude,)))
    return tuple(samples)


def simulate_acquisition(cfg: SimConfig, amplitude: float, width: float) -> list[TrialRecord]:
    """One record per repetition; the selection fires at
    a + b·ID(amplitude, width) plus gaussian noise and lands on the target
    center, so it is always in band."""
    if width <= 0:
        raise DomainError(f"width must be > 0, got {width}")
    difficulty = fitts_id(amplitude, width)
    model_mt = cfg.a + cfg.b * difficulty
    records = []
    for rep in range(cfg.repetitions):
        mt = model_mt
        if cfg.noise_sd > 0:
            stream = SplitMix64(derive_seed(cfg.seed, rep))
            mt += stream.gauss(0.0, cfg.noise_sd)
        mt = max(mt, 1.0 / cfg.sample_rate)
        records.append(TrialRecord(
            trial_id=f"acq-{rep:04d}",
            go_signal=0.0,
            samples=_ramp_samples(mt, amplitude, cfg.sample_rate),
            events=(Event(mt, "selection", position=amplitude),),
            completed=True,
        ))
    return records


@dataclass(frozen=True)
class SubmovementTrace:
    """Endpoints of an iterative-correction movement toward a target at
    `amplitude`: each sub-movement covers all but an `epsilon` fraction of
    the remaining distance; motion stops inside the half-width capture
    radius or at the sub-movement cap (then flagged truncated)."""

    endpoints: tuple[float, ...]
    count: int
    truncated: bool
    remaining: float


def simulate_submovements(
    amplitude: float,
    width: float,
    epsilon: float,
    n_cap: int,
    seed: int = 0,
    noise_sd: float = 0.0,
) -> SubmovementTrace:
    if n_cap < 1:
        raise DomainError(f"n_cap must be >= 1, got {n_cap}")
    if width <= 0:
        raise DomainError(f"width must be > 0, got {width}")
    if not 0.0 <= epsilon < 1.0:
        raise DomainError(f"epsilon must be in [0, 1), got {epsilon}")
    if amplitude < 0:
        raise DomainError(f"amplitude must be >= 0, got {amplitude}")
    stream = SplitMix64(seed) if noise_sd > 0 else None
    endpoints = []
    count = 0
    truncated = False
    remaining = amplitude
    while remaining > width / 2.0:
        if count == n_cap:
            truncated = True
            break
        count += 1
        remaining = amplitude * epsilon ** count
        endpoint = amplitude - remaining
        if stream is not None:
            endpoint += stream.gauss(0.0, noise_sd)
        endpoints.append(endpoint)
    return SubmovementTrace(tuple(endpoints), count, truncated, remaining)


def simulate_steering(
    path: PathSpec,
    tau: float,
    sample_rate: float = 125.0,
    seed: int = 0,
) -> TrialRecord:
    """Follow the tunnel centerline at the width-proportional local speed
    v(s) = W(s)/tau; completion time is exactly tau times the path
    difficulty. The trajectory is deterministic (`seed` is accepted for
    interface symmetry with the other generators but unused)."""
    if tau <= 0:
        raise DomainError(f"tau must be > 0, got {tau}")
    if sample_rate <= 0:
        raise DomainError(f"sample rate must be > 0, got {sample_rate}")
    difficulty = steering_difficulty(path)
    total_time = tau * difficulty
    total_len = path.total_length()

    # cumulative time along the path: dt = tau·ds/W(s), rescaled so the
    # endpoint matches the quadrature difficulty exactly
    n = 4096
    u = np.linspace(0.0, 1.0, n + 1)
    inv_w = np.array([1.0 / path.width_at(v) for v in u])
    cum = np.concatenate(([0.0], np.cumsum((inv_w[:-1] + inv_w[1:]) / 2.0 * (total_len / n))))
    t_grid = tau * cum * (difficulty / cum[-1])

    samples = []
    k = 0
    while True:
        t = k / sample_rate
        if t >= total_time:
            break
        s = float(np.interp(t, t_grid, u))
        samples.append(Sample(t, path.point_at(s)))
        k += 1
    samples.append(Sample(total_time, path.point_at(1.0)))
    return TrialRecord(
        trial_id="steer-0000",
        go_signal=0.0,
        samples=tuple(samples),
        completed=True,
    )


def simulate_rhythm(tempo: float, count: int, asynchrony_sd: float, seed: int) -> np.ndarray:
    """Onset times: the scheduled grid k·60/tempo plus gaussian jitter."""
    if tempo <= 0:
        raise DomainError(f"tempo must be > 0, got {tempo}")
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if asynchrony_sd < 0:
        raise DomainError(f"asynchrony sd must be >= 0, got {asynchrony_sd}")
    period = 60.0 / tempo
    onsets = np.arange(count, dtype=float) * period
    if asynchrony_sd > 0:
        stream = SplitMix64(seed)
        onsets = onsets + np.array([stream.gauss(0.0, asynchrony_sd) for _ in range(count)])
    return onsets


# ---------------------------------------------------------------------------
# whole-plan simulation


def _simulate_musical(task: MusicalTask, cfg: SimConfig, trial_seed: int, trial_id: str) -> TrialRecord:
    stream = SplitMix64(trial_seed)
    events = []
    note_len = 0.08
    for onset, chord in zip(task.onsets, task.pitches):
        t = onset
        if cfg.noise_sd > 0:
            t = max(0.0, t + stream.gauss(0.0, cfg.noise_sd))
        for pitch in chord:
            events.append(Event(t, "note_on", pitch=pitch, velocity=100.0))
        for pitch in chord:
            events.append(Event(t + note_len, "note_off", pitch=pitch))
    events.sort(key=lambda e: e.t)

    samples: tuple[Sample, ...] = ()
    if task.reference:
        # track the commanded feature exactly, sampled at the nominal rate
        ref_t = np.array([p[0] for p in task.reference])
        ref_v = np.array([p[1] for p in task.reference])
        end = float(ref_t[-1])
        ts = np.arange(0.0, end, 1.0 / cfg.sample_rate)
        ts = np.append(ts, end)
        vals = np.interp(ts, ref_t, ref_v)
        samples = tuple(Sample(float(t), (float(v),)) for t, v in zip(ts, vals))

    return TrialRecord(
        trial_id=trial_id,
        go_signal=0.0,
        samples=samples,
        events=tuple(events),
        completed=True,
    )


def simulate_trial(task, cfg: SimConfig, trial_seed: int, trial_id: str) -> TrialRecord:
    """Simulate a single plan trial of any kind."""
    if isinstance(task, AcquisitionTask):
        difficulty = fitts_id(task.amplitude, task.width)
        mt = cfg.a + cfg.b * difficulty
        if cfg.noise_sd > 0:
            mt += SplitMix64(trial_seed).gauss(0.0, cfg.noise_sd)
        mt = max(mt, 1.0 / cfg.sample_rate)
        return TrialRecord(
            trial_id=trial_id,
            go_signal=0.0,
            samples=_ramp_samples(mt, task.amplitude, cfg.sample_rate),
            events=(Event(mt, "selection", position=task.amplitude),),
            completed=True,
        )
    if isinstance(task, SteeringTask):
        record = simulate_steering(task.path, tau=cfg.b, sample_rate=cfg.sample_rate)
        samples = record.samples
        if cfg.a > 0:
            # model intercept as a pre-motion dwell at the tunnel entrance
            start = samples[0]
            samples = (start,) + tuple(Sample(s.t + cfg.a, s.values) for s in samples)
        return TrialRecord(trial_id, 0.0, samples, (), completed=True)
    if isinstance(task, MusicalTask):
        return _simulate_musical(task, cfg, trial_seed, trial_id)
    raise DomainError(f"cannot simulate trial of type {type(task).__name__}")


def simulate_plan(plan: TrialPlan, cfg: SimConfig) -> list[TrialRecord]:
    """One TrialRecord per plan trial, each on its own derived stream."""
    return [
        simulate_trial(task, cfg, derive_seed(cfg.seed, i), trial_id)
        for i, (task, trial_id) in enumerate(zip(plan.trials, plan.trial_ids))
    ]
