"""Per-trial and per-session measurements.

Covers the four evaluation axes: movement time and error for pointing,
tunnel compliance for constrained motion, onset asynchrony for timing
precision, accuracy/resolution/range for feature control, a
power-law-of-practice fit over block means for learnability, and quantized
feature-space coverage for explorability. Standard deviations are
population (divide by N) throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .laws import _ols
from .paths import PathSpec

EVENT_KINDS = ("note_on", "note_off", "selection")


@dataclass(frozen=True)
class Sample:
    t: float
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not math.isfinite(self.t):
            raise ValidationError(f"sample timestamp must be finite, got {self.t}")
        for v in self.values:
            if not math.isfinite(v):
                raise ValidationError(f"sample values must be finite, got {v}")


@dataclass(frozen=True)
class Event:
    t: float
    kind: str
    pitch: float | None = None
    velocity: float | None = None
    position: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise ValidationError(f"event timestamp must be finite, got {self.t}")
        if self.kind not in EVENT_KINDS:
            raise ValidationError(f"unknown event kind {self.kind!r}")
        if self.kind in ("note_on", "note_off") and self.pitch is None:
            raise ValidationError(f"{self.kind} event needs a pitch")
        if self.kind == "selection" and self.position is None:
            raise ValidationError("selection event needs a position")


@dataclass(frozen=True)
class TrialRecord:
    """Everything captured for one trial: the go signal, the sampled input
    stream, discrete events, and outcome flags."""

    trial_id: str
    go_signal: float
    samples: tuple[Sample, ...] = ()
    events: tuple[Event, ...] = ()
    completed: bool = True
    aborted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "events", tuple(self.events))
        if not self.trial_id:
            raise ValidationError("trial id must be non-empty")
        if not math.isfinite(self.go_signal):
            raise ValidationError("go signal must be finite")
        last = -math.inf
        for s in self.samples:
            if s.t < last:
                raise ValidationError("sample timestamps must be non-decreasing")
            last = s.t
        if self.samples and self.samples[0].t < self.go_signal:
            raise ValidationError("go signal must precede all samples")
        last = -math.inf
        for e in self.events:
            if e.t < last:
                raise ValidationError("event timestamps must be non-decreasing")
            last = e.t

    def onsets(self) -> tuple[float, ...]:
        """note_on times relative to the go signal."""
        return tuple(e.t - self.go_signal for e in self.events if e.kind == "note_on")


# ---------------------------------------------------------------------------
# pointing


@dataclass(frozen=True)
class MovementOutcome:
    mt: float | None
    hit: bool
    timeout: bool


def movement_time(trial: TrialRecord, band: tuple[float, float]) -> MovementOutcome:
    """Time from go signal to the first selection event, hit iff the
    selection position lies within `band`. No selection -> timeout outcome
    (flagged, not raised)."""
    lo, hi = float(band[0]), float(band[1])
    for e in trial.events:
        if e.kind == "selection":
            return MovementOutcome(e.t - trial.go_signal, lo <= e.position <= hi, False)
    return MovementOutcome(None, False, True)


def error_rate(outcomes: Sequence[MovementOutcome | bool]) -> float:
    """Fraction of misses; timeouts count as misses. Accepts outcomes or
    raw hit flags."""
    if len(outcomes) == 0:
        raise DomainError("error rate needs at least one trial")
    hits = sum(1 for o in outcomes if (o.hit if isinstance(o, MovementOutcome) else bool(o)))
    return (len(outcomes) - hits) / len(outcomes)


# ---------------------------------------------------------------------------
# steering


@dataclass(frozen=True)
class SteeringOutcome:
    completed: bool
    crossings: int
    time: float


def _project_onto_path(points: np.ndarray, path: PathSpec, n_pieces: int = 1024):
    """Nearest-point projection of 2D samples onto the path centerline.

    Returns (arc positions s in [0, L], distances). Ties between equally
    near candidates (closed paths: end meets start) resolve toward the
    previous sample's arc position, so path-following trajectories project
    monotonically.
    """
    poly, s_norm = path.polyline(n_pieces)
    total = path.total_length()
    seg_a = poly[:-1]
    seg_v = poly[1:] - poly[:-1]
    seg_len2 = np.maximum(np.einsum("ij,ij->i", seg_v, seg_v), 1e-300)
    s_starts = s_norm[:-1] * total
    s_spans = (s_norm[1:] - s_norm[:-1]) * total

    arc = np.empty(len(points))
    dist = np.empty(len(points))
    prev_s = 0.0
    for i, q in enumerate(points):
        diff = q - seg_a
        t = np.clip(np.einsum("ij,ij->i", diff, seg_v) / seg_len2, 0.0, 1.0)
        closest = seg_a + t[:, None] * seg_v
        d2 = np.einsum("ij,ij->i", (q - closest), (q - closest))
        dmin = d2.min()
        candidates = np.flatnonzero(d2 <= dmin + 1e-12)
        s_candidates = s_starts[candidates] + t[candidates] * s_spans[candidates]
        pick = int(np.argmin(np.abs(s_candidates - prev_s)))
        arc[i] = s_candidates[pick]
        dist[i] = math.sqrt(d2[candidates[pick]])
        prev_s = arc[i]
    return arc, dist


def steering_compliance(trial: TrialRecord, path: PathSpec) -> SteeringOutcome:
    """Tunnel compliance for a 2D trajectory: crossings counts entries into
    the region outside the tunnel (a trajectory starting outside counts as
    one); completed requires a sample projecting to the path end while
    inside; time is the traversal duration (to the completing sample when
    completed, else to the last sample)."""
    if not trial.samples:
        raise ValidationError("steering trial has no samples")
    for s in trial.samples:
        if len(s.values) != 2:
            raise ValidationError(f"steering samples must be 2D positions, got {len(s.values)}D")
    points = np.array([s.values for s in trial.samples], dtype=float)
    times = np.array([s.t for s in trial.samples], dtype=float)
    total = path.total_length()
    arc, dist = _project_onto_path(points, path)
    half_width = np.array([path.width_at(min(max(a / total, 0.0), 1.0)) / 2.0 for a in arc])
    inside = dist <= half_width

    crossings = 0
    was_inside = True
    for flag in inside:
        if was_inside and not flag:
            crossings += 1
        was_inside = flag

    end_reached = (arc >= total * (1.0 - 1e-9)) & inside
    if end_reached.any():
        end_idx = int(np.argmax(end_reached))
        return SteeringOutcome(True, crossings, float(times[end_idx] - times[0]))
    return SteeringOutcome(False, crossings, float(times[-1] - times[0]))


# ---------------------------------------------------------------------------
# timing


@dataclass(frozen=True)
class TimingReport:
    mean_asynchrony: float
    sd_asynchrony: float
    max_abs: float
    matched: int
    missed: int
    tempo: float


def timing_deviation(
    onsets: Iterable[float],
    scheduled: Sequence[float],
    period: float,
) -> TimingReport:
    """Match each scheduled beat, in order, to the nearest unclaimed onset
    within ± period/2 (ties to the earlier onset); asynchrony is
    onset - scheduled. Reports mean, population SD, and max |asynchrony|
    over the matches (zeros when nothing matched)."""
    if not (math.isfinite(period) and period > 0):
        raise DomainError(f"period must be > 0, got {period}")
    if len(scheduled) == 0:
        raise DomainError("scheduled beats must be non-empty")
    for prev, nxt in zip(scheduled, scheduled[1:]):
        if nxt <= prev:
            raise DomainError("scheduled beats must be strictly increasing")
    pool = sorted(float(t) for t in onsets)
    claimed = [False] * len(pool)
    half = period / 2.0
    asynchronies = []
    missed = 0
    for beat in scheduled:
        best = -1
        best_abs = math.inf
        for i, t in enumerate(pool):
            if claimed[i]:
                continue
            d = abs(t - beat)
            if d <= half and d < best_abs:
                best = i
                best_abs = d
        if best < 0:
            missed += 1
        else:
            claimed[best] = True
            asynchronies.append(pool[best] - beat)
    if not asynchronies:
        return TimingReport(0.0, 0.0, 0.0, 0, missed, 60.0 / period)
    arr = np.array(asynchronies)
    return TimingReport(
        mean_asynchrony=float(arr.mean()),
        sd_asynchrony=float(arr.std()),
        max_abs=float(np.abs(arr).max()),
        matched=len(asynchronies),
        missed=missed,
        tempo=60.0 / period,
    )


# ---------------------------------------------------------------------------
# feature control


@dataclass(frozen=True)
class FeatureReport:
    accuracy: float
    resolution: float
    range: float


def feature_report(trial: TrialRecord, task, channel: int = 0) -> FeatureReport:
    """Feature controllability against the task's modulation reference.

    accuracy: mean |produced - commanded| with the commanded value
    interpolated at sample times; resolution: the smallest commanded step
    size whose direction the performer reproduced in >= 75% of attempts
    (inf when none qualifies); range: extent of the produced feature.
    Sample times are taken relative to the go signal.
    """
    reference = tuple(getattr(task, "reference", ()) or ())
    if len(reference) < 2:
        raise ValidationError("task carries no modulation reference")
    if not trial.samples:
        raise ValidationError("trial has no samples")
    for s in trial.samples:
        if channel >= len(s.values):
            raise ValidationError(f"samples lack feature channel {channel}")
    t = np.array([s.t - trial.go_signal for s in trial.samples])
    produced = np.array([s.values[channel] for s in trial.samples])
    ref_t = np.array([p[0] for p in reference])
    ref_v = np.array([p[1] for p in reference])
    commanded = np.interp(t, ref_t, ref_v)
    accuracy = float(np.mean(np.abs(produced - commanded)))
    value_range = float(produced.max() - produced.min())

    attempts: dict[float, list[bool]] = {}
    for (t0, v0), (t1, v1) in zip(reference, reference[1:]):
        dv = v1 - v0
        if dv == 0.0 or t1 <= t0:
            continue
        p0, p1 = np.interp([t0, t1], t, produced)
        dp = p1 - p0
        attempts.setdefault(abs(dv), []).append(dp != 0.0 and math.copysign(1, dp) == math.copysign(1, dv))
    resolution = math.inf
    for size in sorted(attempts):
        hits = attempts[size]
        if sum(hits) / len(hits) >= 0.75:
            resolution = size
            break
    return FeatureReport(accuracy, resolution, value_range)


# ---------------------------------------------------------------------------
# learnability


@dataclass(frozen=True)
class LearnabilityReport:
    t1: float
    alpha: float
    r_squared: float
    blocks: int


def learnability_fit(block_mean_times: Sequence[float]) -> LearnabilityReport:
    """Power law of practice: fit T(k) = T1·k^(-alpha) over 1-based block
    indices by OLS on log T against log k."""
    if len(block_mean_times) < 2:
        raise DomainError(f"need >= 2 blocks, got {len(block_mean_times)}")
    times = [float(t) for t in block_mean_times]
    if any(not math.isfinite(t) or t <= 0 for t in times):
        raise DomainError("block mean times must all be > 0")
    log_k = np.log(np.arange(1, len(times) + 1, dtype=float))
    log_t = np.log(np.array(times))
    intercept, slope, r_squared, _sse = _ols(log_k, log_t)
    return LearnabilityReport(math.exp(intercept), -slope + 0.0, r_squared, len(times))


# ---------------------------------------------------------------------------
# explorability


@dataclass(frozen=True)
class ExplorabilityScore:
    cells_visited: int
    total_cells: int
    coverage: float
    entropy_bits: float


def explorability_score(
    samples: Sequence[Sequence[float]],
    grid: Sequence[tuple[int, float, float]],
) -> ExplorabilityScore:
    """Quantize feature vectors onto the grid (one (bins, lo, hi) triple
    per axis; out-of-bounds samples clamp to the edge bins) and report the
    visited-cell count, coverage fraction, and occupancy entropy in bits."""
    if len(samples) == 0:
        raise DomainError("explorability needs at least one sample")
    for bins, lo, hi in grid:
        if bins < 1:
            raise DomainError(f"grid bins must be >= 1, got {bins}")
        if not hi > lo:
            raise DomainError(f"grid bounds must satisfy hi > lo, got [{lo}, {hi}]")
    counts: dict[tuple[int, ...], int] = {}
    for sample in samples:
        if len(sample) != len(grid):
            raise ValidationError(
                f"sample has {len(sample)} axes but grid has {len(grid)}"
            )
        cell = []
        for value, (bins, lo, hi) in zip(sample, grid):
            idx = int((float(value) - lo) / (hi - lo) * bins)
            cell.append(min(max(idx, 0), bins - 1))
        key = tuple(cell)
        counts[key] = counts.get(key, 0) + 1
    total_cells = 1
    for bins, _, _ in grid:
        total_cells *= bins
    n = len(samples)
    entropy = -sum((c / n) * math.log2(c / n) for c in counts.values())
    return ExplorabilityScore(len(counts), total_cells, len(counts) / total_cells, entropy)
