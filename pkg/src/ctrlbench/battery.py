"""Trial-plan generators for HCI and musical task batteries.

A battery expands a compact spec (condition sets, repetitions, blocks,
seed) into an ordered list of concrete trials, partitioned into equal-size
blocks so learning curves can be fitted over block means. Generation is a
pure function of (spec, seed): condition sets are sorted before crossing
and shuffling uses the pinned generator from `rng`, so identical inputs
reproduce identical plans byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .errors import DomainError, ValidationError
from .laws import fitts_id
from .paths import PathSpec
from .rng import SplitMix64, derive_seed

MUSICAL_KINDS = (
    "isolated-tone",
    "glissando",
    "trill",
    "grace-note",
    "scale",
    "arpeggio",
    "phrase-contour",
    "feature-modulation",
    "rhythm",
    "synchronization",
)

MAJOR_SCALE = (0, 2, 4, 5, 7, 9, 11)
MAJOR_TRIAD = (0, 4, 7)


@dataclass(frozen=True)
class AcquisitionTask:
    """Point at a band of width `width` centered `amplitude` away from the
    start, in screen units or cents (pitch acquisition)."""

    amplitude: float
    width: float
    units: str = "screen"
    dimensions: int = 1
    selection: str = "dwell"
    dwell_ms: float | None = 300.0
    rep: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ValidationError(f"amplitude must be finite and >= 0, got {self.amplitude}")
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValidationError(f"width must be > 0, got {self.width}")
        if self.units not in ("screen", "cents"):
            raise ValidationError(f"units must be 'screen' or 'cents', got {self.units!r}")
        if self.dimensions not in (1, 2):
            raise ValidationError(f"dimensions must be 1 or 2, got {self.dimensions}")
        if self.selection not in ("click", "dwell"):
            raise ValidationError(f"selection must be 'click' or 'dwell', got {self.selection!r}")
        if self.selection == "dwell" and (self.dwell_ms is None or self.dwell_ms <= 0):
            raise ValidationError("dwell selection needs dwell_ms > 0")

    @property
    def difficulty(self) -> float:
        return fitts_id(self.amplitude, self.width)

    def band(self) -> tuple[float, float]:
        """Acceptance band centered on the target."""
        return (self.amplitude - self.width / 2.0, self.amplitude + self.width / 2.0)


@dataclass(frozen=True)
class SteeringTask:
    path: PathSpec
    difficulty: float
    rep: int = 0


@dataclass(frozen=True)
class MusicalTask:
    """One playable musical trial.

    `onsets` are seconds from the trial go signal; `pitches` holds one
    chord (tuple of MIDI-style pitch numbers) per onset, stacked in octaves
    when polyphony > 1. Feature-modulation and glissando trials also carry
    a piecewise-linear `reference` trajectory (t, value) for the modulated
    feature; `params` keeps kind-specific settings for the record.
    """

    kind: str
    onsets: tuple[float, ...] = ()
    pitches: tuple[tuple[float, ...], ...] = ()
    tempo: float | None = None
    polyphony: int = 1
    articulation: str | None = None
    reference: tuple[tuple[float, float], ...] = ()
    params: dict = field(default_factory=dict)
    rep: int = 0

    def __post_init__(self):
        object.__setattr__(self, "onsets", tuple(float(t) for t in self.onsets))
        object.__setattr__(
            self, "pitches", tuple(tuple(float(p) for p in chord) for chord in self.pitches)
        )
        object.__setattr__(self, "reference", tuple((float(t), float(v)) for t, v in self.reference))
        if self.kind not in MUSICAL_KINDS:
            raise ValidationError(f"unknown musical task kind {self.kind!r}")
        if self.polyphony < 1:
            raise ValidationError(f"polyphony must be >= 1, got {self.polyphony}")
        if self.tempo is not None and not (math.isfinite(self.tempo) and self.tempo > 0):
            raise ValidationError(f"tempo must be > 0, got {self.tempo}")
        if len(self.pitches) != len(self.onsets):
            raise ValidationError("pitches and onsets must align one chord per onset")
        last = -math.inf
        for t in self.onsets:
            if not math.isfinite(t) or t < 0:
                raise ValidationError(f"onsets must be finite and >= 0, got {t}")
            if t < last:
                raise ValidationError("onsets must be non-decreasing")
            last = t
        for chord in self.pitches:
            for p in chord:
                if not math.isfinite(p):
                    raise ValidationError(f"pitch values must be finite, got {p}")

    @property
    def melody(self) -> tuple[float, ...]:
        """First voice of each chord."""
        return tuple(chord[0] for chord in self.pitches if chord)


Trial = AcquisitionTask | SteeringTask | MusicalTask


@dataclass(frozen=True)
class TrialPlan:
    trials: tuple[Trial, ...]
    seed: int
    device: str = ""
    n_blocks: int = 1

    def __post_init__(self):
        object.__setattr__(self, "trials", tuple(self.trials))
        if not self.trials:
            raise ValidationError("plan has no trials")
        if self.n_blocks < 1 or len(self.trials) % self.n_blocks != 0:
            raise ValidationError(
                f"{len(self.trials)} trials cannot split into {self.n_blocks} equal blocks"
            )

    @property
    def block_size(self) -> int:
        return len(self.trials) // self.n_blocks

    @property
    def trial_ids(self) -> tuple[str, ...]:
        return tuple(f"t-{i:04d}" for i in range(len(self.trials)))

    def task_for(self, trial_id: str) -> Trial:
        try:
            index = int(trial_id.split("-", 1)[1])
        except (IndexError, ValueError):
            raise KeyError(trial_id) from None
        if not (trial_id.startswith("t-") and 0 <= index < len(self.trials)):
            raise KeyError(trial_id)
        return self.trials[index]

    def block_of(self, index: int) -> int:
        return index // self.block_size

    def blocks(self) -> tuple[tuple[Trial, ...], ...]:
        size = self.block_size
        return tuple(self.trials[i * size:(i + 1) * size] for i in range(self.n_blocks))


# ---------------------------------------------------------------------------
# HCI batteries


def generate_acquisition_battery(
    amplitudes: Iterable[float],
    widths: Iterable[float],
    reps_per_block: int,
    blocks: int,
    seed: int,
    *,
    units: str = "screen",
    dimensions: int = 1,
    selection: str = "dwell",
    dwell_ms: float | None = 300.0,
    device: str = "",
) -> TrialPlan:
    """Full amplitude × width crossing, `reps_per_block` repetitions of each
    condition per block, order shuffled within each block."""
    amplitudes = sorted(set(float(a) for a in amplitudes))
    widths = sorted(set(float(w) for w in widths))
    if not amplitudes or not widths:
        raise ValidationError("amplitude and width sets must be non-empty")
    if any(w <= 0 for w in widths):
        raise ValidationError(f"widths must all be > 0, got {widths}")
    if reps_per_block < 1 or blocks < 1:
        raise ValidationError("reps_per_block and blocks must be >= 1")
    trials: list[Trial] = []
    for block in range(blocks):
        block_trials: list[Trial] = [
            AcquisitionTask(
                amplitude=a,
                width=w,
                units=units,
                dimensions=dimensions,
                selection=selection,
                dwell_ms=dwell_ms if selection == "dwell" else None,
                rep=block * reps_per_block + r,
            )
            for a in amplitudes
            for w in widths
            for r in range(reps_per_block)
        ]
        SplitMix64(derive_seed(seed, block)).shuffle(block_trials)
        trials.extend(block_trials)
    return TrialPlan(tuple(trials), seed, device, blocks)


def generate_steering_battery(
    paths: Sequence[PathSpec],
    reps_per_block: int,
    blocks: int,
    seed: int,
    *,
    device: str = "",
) -> TrialPlan:
    """Tunnel-traversal battery; each trial carries its precomputed path
    difficulty. Use PathSpec.straight / PathSpec.circle for the presets."""
    from .paths import steering_difficulty

    if not paths:
        raise ValidationError("path set must be non-empty")
    if reps_per_block < 1 or blocks < 1:
        raise ValidationError("reps_per_block and blocks must be >= 1")
    with_difficulty = sorted(
        ((steering_difficulty(p), p) for p in paths), key=lambda pair: pair[0]
    )
    trials: list[Trial] = []
    for block in range(blocks):
        block_trials: list[Trial] = [
            SteeringTask(path=p, difficulty=d, rep=block * reps_per_block + r)
            for d, p in with_difficulty
            for r in range(reps_per_block)
        ]
        SplitMix64(derive_seed(seed, block)).shuffle(block_trials)
        trials.extend(block_trials)
    return TrialPlan(tuple(trials), seed, device, blocks)


# ---------------------------------------------------------------------------
# musical battery


def _beat(tempo: float) -> float:
    return 60.0 / tempo


def _stack(pitch: float, polyphony: int) -> tuple[float, ...]:
    return tuple(pitch + 12.0 * v for v in range(polyphony))


def _melodic(kind, pitches, tempo, polyphony, articulation, params, rep):
    onsets = tuple(k * _beat(tempo) for k in range(len(pitches)))
    chords = tuple(_stack(p, polyphony) for p in pitches)
    return MusicalTask(kind, onsets, chords, tempo, polyphony, articulation, (), params, rep)


def _expand_scale(kind, params, tempo, polyphony, rng, rep):
    root = float(params.get("root", 60))
    octaves = int(params.get("octaves", 1))
    direction = params.get("direction", "up")
    articulation = params.get("articulation", "legato")
    intervals = tuple(params.get("intervals", MAJOR_SCALE if kind == "scale" else MAJOR_TRIAD))
    if octaves < 1:
        raise ValidationError(f"octaves must be >= 1, got {octaves}")
    if direction not in ("up", "down", "updown"):
        raise ValidationError(f"direction must be up, down, or updown, got {direction!r}")
    ascending = [root + 12 * o + iv for o in range(octaves) for iv in intervals]
    ascending.append(root + 12.0 * octaves)
    if direction == "up":
        pitches = ascending
    elif direction == "down":
        pitches = ascending[::-1]
    else:
        pitches = ascending + ascending[-2::-1]
    recorded = dict(params, root=root, octaves=octaves, direction=direction)
    return _melodic(kind, pitches, tempo, polyphony, articulation, recorded, rep)


def _expand_phrase_contour(params, tempo, polyphony, rng, rep):
    contour = params.get("contour", "monotonic-up")
    length = int(params.get("length", 6))
    start = float(params.get("start", 60))
    max_step = int(params.get("max_step", 3))
    if length < 2:
        raise ValidationError(f"phrase length must be >= 2, got {length}")
    if max_step < 1:
        raise ValidationError(f"max_step must be >= 1, got {max_step}")
    pitches = [start]
    for _ in range(length - 1):
        if contour == "monotonic-up":
            step = rng.next_below(max_step) + 1
        elif contour == "monotonic-down":
            step = -(rng.next_below(max_step) + 1)
        elif contour == "random":
            step = rng.next_below(2 * max_step + 1) - max_step
        else:
            raise ValidationError(f"unknown contour {contour!r}")
        pitches.append(pitches[-1] + step)
    recorded = dict(params, contour=contour, length=length, start=start)
    return _melodic("phrase-contour", pitches, tempo, polyphony, None, recorded, rep)


def _expand_trill(params, tempo, polyphony, rep):
    pitch = float(params.get("pitch", 60))
    interval = float(params.get("interval", 2))
    rate = float(params.get("rate", 8.0))
    count = int(params.get("count", 16))
    if rate <= 0:
        raise ValidationError(f"trill rate must be > 0, got {rate}")
    if count < 2:
        raise ValidationError(f"trill count must be >= 2, got {count}")
    onsets = tuple(k / rate for k in range(count))
    chords = tuple(_stack(pitch + (interval if k % 2 else 0.0), polyphony) for k in range(count))
    recorded = dict(params, pitch=pitch, interval=interval, rate=rate, count=count)
    return MusicalTask("trill", onsets, chords, tempo, polyphony, None, (), recorded, rep)


def _expand_grace_note(params, tempo, polyphony, rep):
    principal = float(params.get("principal", 60))
    interval = float(params.get("interval", 2))
    gap_ms = float(params.get("gap_ms", 80.0))
    if gap_ms <= 0:
        raise ValidationError(f"gap_ms must be > 0, got {gap_ms}")
    onsets = (0.0, gap_ms / 1000.0)
    chords = (_stack(principal + interval, polyphony), _stack(principal, polyphony))
    recorded = dict(params, principal=principal, interval=interval, gap_ms=gap_ms)
    return MusicalTask("grace-note", onsets, chords, tempo, polyphony, None, (), recorded, rep)


def _expand_glissando(params, tempo, polyphony, rep):
    start = float(params.get("start", 60))
    end = float(params.get("end", 72))
    duration_beats = float(params.get("duration_beats", 4))
    if duration_beats <= 0:
        raise ValidationError(f"duration_beats must be > 0, got {duration_beats}")
    duration = duration_beats * _beat(tempo)
    reference = ((0.0, start), (duration, end))
    chords = (_stack(start, polyphony), _stack(end, polyphony))
    recorded = dict(params, start=start, end=end, duration_beats=duration_beats)
    return MusicalTask("glissando", (0.0, duration), chords, tempo, polyphony, None,
                       reference, recorded, rep)


def _modulation_reference(onsets, modulated, beat, depth):
    """Triangular depth bump over each modulated note's beat."""
    points: list[tuple[float, float]] = [(0.0, 0.0)]
    for k in modulated:
        t0 = onsets[k]
        if points[-1][0] < t0:
            points.append((t0, 0.0))
        points.append((t0 + beat / 2.0, depth))
        points.append((t0 + beat, 0.0))
    end = onsets[-1] + beat
    if points[-1][0] < end:
        points.append((end, 0.0))
    return tuple(points)


def _expand_feature_modulation(params, tempo, polyphony, rep):
    preset = params.get("preset", "circle-of-four")
    feature = params.get("feature", "pitch")
    depth = float(params.get("depth", 100.0))
    beat = _beat(tempo)
    if preset == "circle-of-four":
        # four notes stacked in perfect fourths, cycled; every second note
        # carries the modulation
        root = float(params.get("root", 60))
        cycles = int(params.get("cycles", 1))
        if cycles < 1:
            raise ValidationError(f"cycles must be >= 1, got {cycles}")
        base = [root + 5.0 * k for k in range(4)]
        pitches = base * cycles
    elif preset == "two-pairs":
        # an ascending pair and a descending pair on opposite trajectories;
        # the second note of each pair is modulated
        root = float(params.get("root", 60))
        pitches = [root, root + 5.0, root + 12.0, root + 7.0]
    elif preset == "pursuit":
        # pursuit tracking: no notes, chase a moving reference
        rate = float(params.get("rate", 0.5))
        duration_beats = float(params.get("duration_beats", 8))
        if rate <= 0 or duration_beats <= 0:
            raise ValidationError("pursuit rate and duration_beats must be > 0")
        duration = duration_beats * beat
        knots = 64
        reference = tuple(
            (k * duration / knots, depth * math.sin(2.0 * math.pi * rate * k * duration / knots))
            for k in range(knots + 1)
        )
        recorded = dict(params, preset=preset, feature=feature, depth=depth, rate=rate)
        return MusicalTask("feature-modulation", (), (), tempo, polyphony, None,
                           reference, recorded, rep)
    else:
        raise ValidationError(f"unknown feature-modulation preset {preset!r}")
    onsets = tuple(k * beat for k in range(len(pitches)))
    chords = tuple(_stack(p, polyphony) for p in pitches)
    modulated = tuple(k for k in range(len(pitches)) if k % 2 == 1)
    reference = _modulation_reference(onsets, modulated, beat, depth)
    recorded = dict(params, preset=preset, feature=feature, depth=depth,
                    modulated=list(modulated))
    return MusicalTask("feature-modulation", onsets, chords, tempo, polyphony, None,
                       reference, recorded, rep)


def _expand_rhythm(params, tempo, polyphony, rep):
    count = int(params.get("count", 4))
    subdivision = int(params.get("subdivision", 1))
    pitch = float(params.get("pitch", 60))
    if count < 1 or subdivision < 1:
        raise ValidationError("rhythm count and subdivision must be >= 1")
    period = _beat(tempo) / subdivision
    onsets = tuple(k * period for k in range(count))
    chords = tuple(_stack(pitch, polyphony) for _ in range(count))
    recorded = dict(params, count=count, subdivision=subdivision, pitch=pitch)
    return MusicalTask("rhythm", onsets, chords, tempo, polyphony, None, (), recorded, rep)


def _expand_synchronization(params, tempo, polyphony, rep):
    """Two concurrent pulse streams in a p:q ratio; the scheduled alignment
    point is their first common downbeat after the start. Minimal reading
    of "synchronization of musical processes" — one defensible task, not
    the only one."""
    p = int(params.get("ratio_a", 2))
    q = int(params.get("ratio_b", 3))
    cycles = int(params.get("cycles", 1))
    pitch_a = float(params.get("pitch_a", 60))
    pitch_b = float(params.get("pitch_b", 67))
    if p < 1 or q < 1 or p == q:
        raise ValidationError(f"ratio must be two distinct positive integers, got {p}:{q}")
    if cycles < 1:
        raise ValidationError(f"cycles must be >= 1, got {cycles}")
    beat = _beat(tempo)
    span = p * beat
    onsets_a = [k * beat for k in range(p * cycles + 1)]
    onsets_b = [k * span / q for k in range(q * cycles + 1)]
    events = sorted({(t, pitch_a) for t in onsets_a} | {(t, pitch_b) for t in onsets_b})
    merged: dict[float, list[float]] = {}
    for t, pitch in events:
        merged.setdefault(t, []).append(pitch)
    onsets = tuple(sorted(merged))
    chords = tuple(tuple(sorted(merged[t])) for t in onsets)
    recorded = dict(params, ratio_a=p, ratio_b=q, cycles=cycles,
                    onsets_a=onsets_a, onsets_b=onsets_b, alignment_t=span)
    return MusicalTask("synchronization", onsets, chords, tempo, max(polyphony, 2), None,
                       (), recorded, rep)


def _expand_musical(kind, params, tempo, polyphony, rng, rep):
    if kind == "isolated-tone":
        pitch = float(params.get("pitch", 60))
        return MusicalTask(kind, (0.0,), (_stack(pitch, polyphony),), tempo, polyphony,
                           params.get("articulation"), (), dict(params, pitch=pitch), rep)
    if kind in ("scale", "arpeggio"):
        return _expand_scale(kind, params, tempo, polyphony, rng, rep)
    if kind == "phrase-contour":
        return _expand_phrase_contour(params, tempo, polyphony, rng, rep)
    if kind == "trill":
        return _expand_trill(params, tempo, polyphony, rep)
    if kind == "grace-note":
        return _expand_grace_note(params, tempo, polyphony, rep)
    if kind == "glissando":
        return _expand_glissando(params, tempo, polyphony, rep)
    if kind == "feature-modulation":
        return _expand_feature_modulation(params, tempo, polyphony, rep)
    if kind == "rhythm":
        return _expand_rhythm(params, tempo, polyphony, rep)
    if kind == "synchronization":
        return _expand_synchronization(params, tempo, polyphony, rep)
    raise ValidationError(f"unknown musical task kind {kind!r}")


def generate_musical_battery(
    kind: str,
    params: Mapping[str, Any] | None = None,
    *,
    tempi: Iterable[float] = (120.0,),
    polyphony: int = 1,
    reps_per_block: int = 1,
    blocks: int = 1,
    seed: int = 0,
    device: str = "",
) -> TrialPlan:
    """Musical battery: the kind-specific expansion crossed with the tempo
    set, repeated per block and shuffled within blocks."""
    if kind not in MUSICAL_KINDS:
        raise ValidationError(f"unknown musical task kind {kind!r}")
    params = dict(params or {})
    tempi = sorted(set(float(t) for t in tempi))
    if not tempi:
        raise ValidationError("tempo set must be non-empty")
    if any(not math.isfinite(t) or t <= 0 for t in tempi):
        raise ValidationError(f"tempi must all be > 0, got {tempi}")
    if polyphony < 1:
        raise ValidationError(f"polyphony must be >= 1, got {polyphony}")
    if reps_per_block < 1 or blocks < 1:
        raise ValidationError("reps_per_block and blocks must be >= 1")
    trials: list[Trial] = []
    for block in range(blocks):
        rng = SplitMix64(derive_seed(seed, block))
        block_trials: list[Trial] = [
            _expand_musical(kind, params, tempo, polyphony, rng,
                            rep=block * reps_per_block + r)
            for tempo in tempi
            for r in range(reps_per_block)
        ]
        rng.shuffle(block_trials)
        trials.extend(block_trials)
    return TrialPlan(tuple(trials), seed, device, blocks)


# ---------------------------------------------------------------------------
# pitch targets


@dataclass(frozen=True)
class PitchTarget:
    """Acceptance band around a target frequency, ± tolerance in cents."""

    f0: float
    tolerance_cents: float
    lo: float
    hi: float
    amplitude_cents: float | None = None

    @property
    def width_cents(self) -> float:
        """Full band width: the pointing-law W for pitch acquisition."""
        return 2.0 * self.tolerance_cents


def pitch_target(f0: float, tolerance_cents: float, start_hz: float | None = None) -> PitchTarget:
    """Band [f0·2^(-tol/1200), f0·2^(+tol/1200)] plus the pointing-law
    mapping: W = 2·tolerance in cents, and A = unsigned cents distance from
    `start_hz` when a trial start pitch is given."""
    if not (math.isfinite(f0) and f0 > 0):
        raise DomainError(f"f0 must be > 0, got {f0}")
    if not (math.isfinite(tolerance_cents) and tolerance_cents >= 0):
        raise DomainError(f"tolerance must be >= 0, got {tolerance_cents}")
    ratio = 2.0 ** (tolerance_cents / 1200.0)
    amplitude = None
    if start_hz is not None:
        if not (math.isfinite(start_hz) and start_hz > 0):
            raise DomainError(f"start_hz must be > 0, got {start_hz}")
        amplitude = abs(1200.0 * math.log2(f0 / start_hz))
    return PitchTarget(f0, tolerance_cents, f0 / ratio, f0 * ratio, amplitude)


# ---------------------------------------------------------------------------
# battery spec documents


def plan_from_spec(spec: Mapping[str, Any]) -> TrialPlan:
    """Build a plan from a parsed battery spec document (see docs/formats.md)."""
    if not isinstance(spec, Mapping):
        raise ValidationError("battery spec must be a JSON object")
    task = spec.get("task")
    common = dict(
        reps_per_block=int(spec.get("reps_per_block", 1)),
        blocks=int(spec.get("blocks", 1)),
        seed=int(spec.get("seed", 0)),
    )
    device = spec.get("device", "")
    if task == "acquisition":
        return generate_acquisition_battery(
            spec["amplitudes"],
            spec["widths"],
            units=spec.get("units", "screen"),
            dimensions=int(spec.get("dimensions", 1)),
            selection=spec.get("selection", "dwell"),
            dwell_ms=spec.get("dwell_ms", 300.0),
            device=device,
            **common,
        )
    if task == "steering":
        paths = [_path_from_spec(p) for p in spec.get("paths", [])]
        return generate_steering_battery(paths, device=device, **common)
    if task == "musical":
        return generate_musical_battery(
            spec.get("kind", ""),
            spec.get("params", {}),
            tempi=spec.get("tempi", (120.0,)),
            polyphony=int(spec.get("polyphony", 1)),
            device=device,
            **common,
        )
    raise ValidationError(f"unknown battery task {task!r}")


def _path_from_spec(doc: Mapping[str, Any]) -> PathSpec:
    from . import serde

    if "preset" in doc:
        preset = doc["preset"]
        if preset == "straight":
            return PathSpec.straight(float(doc["length"]), float(doc["width"]))
        if preset == "circle":
            return PathSpec.circle(float(doc["radius"]), float(doc["width"]))
        raise ValidationError(f"unknown path preset {preset!r}")
    return serde.path_from_jsonable(doc)
