"""Session lifecycle: ingestion, persistence, and device comparison.

A session binds one device and one trial plan to a stream of trial
messages (trial_start, samples, events, trial_end). Ingestion is
validate-then-mutate, so a rejected message leaves the session exactly as
it was. Closed sessions serialize to a versioned line-delimited JSON log
whose export/import roundtrip is lossless and byte-stable; simulated and
UI-captured sessions share the format, so every downstream consumer is
agnostic about where the data came from.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from . import serde
from .battery import AcquisitionTask, MusicalTask, SteeringTask, TrialPlan
from .errors import (
    DomainError,
    ParseError,
    ProtocolError,
    StateError,
    ValidationError,
    VersionError,
)
from .laws import FitResult, Observation, fit_linear_law, fit_meyer
from .metrics import (
    Event,
    Sample,
    TrialRecord,
    explorability_score,
    feature_report,
    learnability_fit,
    movement_time,
    steering_compliance,
    timing_deviation,
)
from .taxonomy import DeviceDescriptor

FORMAT_VERSION = 1

TASK_CLASSES = (
    "acquisition",
    "pitch-acquisition",
    "steering",
    "modulation",
    "rhythm",
    "synchronization",
)


def task_class(task) -> str:
    """Aggregation class of a trial for the comparison report."""
    if isinstance(task, AcquisitionTask):
        return "pitch-acquisition" if task.units == "cents" else "acquisition"
    if isinstance(task, SteeringTask):
        return "steering"
    if isinstance(task, MusicalTask):
        if task.kind in ("feature-modulation", "glissando"):
            return "modulation"
        if task.kind == "synchronization":
            return "synchronization"
        return "rhythm"
    raise DomainError(f"unknown task type {type(task).__name__}")


@dataclass
class SessionRecord:
    session_id: str
    device: DeviceDescriptor
    plan: TrialPlan
    trials: dict[str, TrialRecord] = field(default_factory=dict)
    trial_metrics: dict[str, dict] = field(default_factory=dict)
    status: str = "open"


class Session:
    """Single-writer ingestion state machine over one SessionRecord."""

    def __init__(self, session_id: str, device: DeviceDescriptor, plan: TrialPlan):
        self.record = SessionRecord(session_id, device, plan)
        self._active: str | None = None
        self._go: float = 0.0
        self._last_t: float = 0.0
        self._samples: list[Sample] = []
        self._events: list[Event] = []

    # -- protocol ------------------------------------------------------

    def ingest(self, message: Mapping) -> None:
        """Apply one trial message; raises ProtocolError (state unchanged)
        on any violation."""
        if self.record.status != "open":
            raise ProtocolError(f"session {self.record.session_id!r} is {self.record.status}")
        if not isinstance(message, Mapping):
            raise ProtocolError(f"message must be an object, got {type(message).__name__}")
        version = message.get("v", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ProtocolError(f"unsupported message version {version!r}")
        mtype = message.get("type")
        if mtype == "trial_start":
            self._on_trial_start(message)
        elif mtype == "sample":
            self._on_sample(message)
        elif mtype == "event":
            self._on_event(message)
        elif mtype == "trial_end":
            self._on_trial_end(message)
        else:
            raise ProtocolError(f"unexpected message type {mtype!r}")

    @staticmethod
    def _timestamp(message: Mapping) -> float:
        t = message.get("t")
        if not isinstance(t, (int, float)) or isinstance(t, bool) or not math.isfinite(t):
            raise ProtocolError(f"message needs a finite timestamp, got {t!r}")
        return float(t)

    def _require_active(self, message: Mapping) -> float:
        if self._active is None:
            raise ProtocolError(f"{message.get('type')} before trial_start")
        if message.get("trial") != self._active:
            raise ProtocolError(
                f"message for trial {message.get('trial')!r} while {self._active!r} is open"
            )
        t = self._timestamp(message)
        if t < self._last_t:
            raise ProtocolError(f"out-of-order timestamp {t} < {self._last_t}")
        return t

    def _on_trial_start(self, message: Mapping) -> None:
        if self._active is not None:
            raise ProtocolError(f"trial {self._active!r} is still open")
        trial_id = message.get("trial")
        if not isinstance(trial_id, str):
            raise ProtocolError(f"trial_start needs a trial id, got {trial_id!r}")
        if trial_id in self.record.trials:
            raise ProtocolError(f"duplicate trial id {trial_id!r}")
        try:
            self.record.plan.task_for(trial_id)
        except KeyError:
            raise ProtocolError(f"unknown trial id {trial_id!r}") from None
        t = self._timestamp(message)
        self._active = trial_id
        self._go = t
        self._last_t = t
        self._samples = []
        self._events = []

    def _on_sample(self, message: Mapping) -> None:
        t = self._require_active(message)
        values = message.get("values")
        if not isinstance(values, (list, tuple)):
            raise ProtocolError(f"sample needs a values array, got {values!r}")
        try:
            sample = Sample(t, tuple(float(v) for v in values))
        except (TypeError, ValueError) as exc:
            raise ProtocolError(f"bad sample values: {exc}") from exc
        self._samples.append(sample)
        self._last_t = t

    def _on_event(self, message: Mapping) -> None:
        t = self._require_active(message)
        try:
            event = Event(
                t=t,
                kind=message.get("kind"),
                pitch=_opt_float(message.get("pitch")),
                velocity=_opt_float(message.get("velocity")),
                position=_opt_float(message.get("position")),
            )
        except (TypeError, ValueError) as exc:
            raise ProtocolError(f"bad event: {exc}") from exc
        self._events.append(event)
        self._last_t = t

    def _on_trial_end(self, message: Mapping) -> None:
        self._require_active(message)
        trial_id = self._active
        assert trial_id is not None
        record = TrialRecord(
            trial_id=trial_id,
            go_signal=self._go,
            samples=tuple(self._samples),
            events=tuple(self._events),
            completed=bool(message.get("completed", True)),
            aborted=bool(message.get("aborted", False)),
        )
        self.record.trials[trial_id] = record
        self._active = None
        self._samples = []
        self._events = []

    # -- lifecycle -----------------------------------------------------

    @property
    def active_trial(self) -> str | None:
        return self._active

    def abort_active_trial(self) -> str | None:
        """Store the open trial (if any) as aborted; returns its id."""
        if self._active is None:
            return None
        trial_id = self._active
        self.record.trials[trial_id] = TrialRecord(
            trial_id=trial_id,
            go_signal=self._go,
            samples=tuple(self._samples),
            events=tuple(self._events),
            completed=False,
            aborted=True,
        )
        self._active = None
        self._samples = []
        self._events = []
        return trial_id

    def finalize_trial(self, trial_id: str) -> dict:
        """Compute and attach the metrics appropriate to the trial's task
        kind; idempotent (the first computed result is kept)."""
        if trial_id not in self.record.trials:
            raise StateError(f"trial {trial_id!r} has not ended")
        if trial_id in self.record.trial_metrics:
            return self.record.trial_metrics[trial_id]
        task = self.record.plan.task_for(trial_id)
        try:
            metrics = compute_trial_metrics(task, self.record.trials[trial_id])
        except ValidationError as exc:
            # aborted trials may lack the data their metric needs
            metrics = {"kind": "unavailable", "reason": str(exc)}
        self.record.trial_metrics[trial_id] = metrics
        return metrics

    def close(self) -> SessionRecord:
        """Finalize every ended trial, abort a dangling open trial, and
        freeze the session."""
        if self.record.status != "open":
            return self.record
        self.abort_active_trial()
        for trial_id in self.record.trials:
            self.finalize_trial(trial_id)
        self.record.status = "closed"
        return self.record


def _opt_float(value) -> float | None:
    return None if value is None else float(value)


def compute_trial_metrics(task, record: TrialRecord) -> dict:
    """Task-kind-appropriate metrics as a JSON-safe dict."""
    if isinstance(task, AcquisitionTask):
        outcome = movement_time(record, task.band())
        return {
            "kind": "movement",
            "mt": outcome.mt,
            "hit": outcome.hit,
            "timeout": outcome.timeout,
            "difficulty": task.difficulty,
        }
    if isinstance(task, SteeringTask):
        out = steering_compliance(record, task.path)
        return {
            "kind": "steering",
            "completed": out.completed,
            "crossings": out.crossings,
            "time": out.time,
            "difficulty": task.difficulty,
        }
    if isinstance(task, MusicalTask):
        if task.reference:
            rep = feature_report(record, task)
            return {
                "kind": "feature",
                "accuracy": rep.accuracy,
                "resolution": None if math.isinf(rep.resolution) else rep.resolution,
                "range": rep.range,
            }
        scheduled = list(task.onsets)
        if not scheduled:
            return {"kind": "timing", "matched": 0, "missed": 0}
        if len(scheduled) >= 2:
            period = min(b - a for a, b in zip(scheduled, scheduled[1:]) if b > a)
        else:
            period = 60.0 / (task.tempo or 120.0)
        report = timing_deviation(record.onsets(), scheduled, period)
        return {
            "kind": "timing",
            "mean_asynchrony": report.mean_asynchrony,
            "sd_asynchrony": report.sd_asynchrony,
            "max_abs": report.max_abs,
            "matched": report.matched,
            "missed": report.missed,
            "tempo": task.tempo,
        }
    raise DomainError(f"cannot compute metrics for {type(task).__name__}")


# ---------------------------------------------------------------------------
# feeding records through ingestion


def trial_messages(trial_id: str, record: TrialRecord) -> Iterator[dict]:
    """Protocol messages reproducing a TrialRecord, samples and events
    merged into one non-decreasing stream."""
    yield {"v": FORMAT_VERSION, "type": "trial_start", "trial": trial_id, "t": record.go_signal}
    merged: list[tuple[float, dict]] = []
    for s in record.samples:
        merged.append((s.t, {"v": FORMAT_VERSION, "type": "sample", "trial": trial_id,
                             "t": s.t, "values": list(s.values)}))
    for e in record.events:
        msg = {"v": FORMAT_VERSION, "type": "event", "trial": trial_id, "t": e.t, "kind": e.kind}
        if e.pitch is not None:
            msg["pitch"] = e.pitch
        if e.velocity is not None:
            msg["velocity"] = e.velocity
        if e.position is not None:
            msg["position"] = e.position
        merged.append((e.t, msg))
    merged.sort(key=lambda pair: pair[0])  # stable: samples stay before events at equal t
    for _, msg in merged:
        yield msg
    yield {
        "v": FORMAT_VERSION,
        "type": "trial_end",
        "trial": trial_id,
        "t": _end_time(record),
        "completed": record.completed,
        "aborted": record.aborted,
    }


def _end_time(record: TrialRecord) -> float:
    t = record.go_signal
    if record.samples:
        t = max(t, record.samples[-1].t)
    if record.events:
        t = max(t, record.events[-1].t)
    return t


def session_from_records(
    session_id: str,
    device: DeviceDescriptor,
    plan: TrialPlan,
    records: Iterable[TrialRecord],
) -> SessionRecord:
    """Build a closed session by pushing simulated records through the same
    ingestion path UI captures take."""
    session = Session(session_id, device, plan)
    for record in records:
        for message in trial_messages(record.trial_id, record):
            session.ingest(message)
        session.finalize_trial(record.trial_id)
    return session.close()


# ---------------------------------------------------------------------------
# log persistence


def export_log(record: SessionRecord) -> bytes:
    """Line-delimited JSON log, canonical encoding (byte-stable)."""
    lines = [serde.dumps({
        "v": FORMAT_VERSION,
        "type": "session_start",
        "session": record.session_id,
        "device": serde.device_to_jsonable(record.device),
        "plan": serde.plan_to_jsonable(record.plan),
    })]
    for trial_id, rec in record.trials.items():
        for message in trial_messages(trial_id, rec):
            lines.append(serde.dumps(message))
        if trial_id in record.trial_metrics:
            lines.append(serde.dumps({
                "v": FORMAT_VERSION,
                "type": "metrics",
                "trial": trial_id,
                "payload": record.trial_metrics[trial_id],
            }))
    lines.append(serde.dumps({"v": FORMAT_VERSION, "type": "session_end", "status": record.status}))
    return ("\n".join(lines) + "\n").encode("utf-8")


def import_log(data: bytes | str) -> SessionRecord:
    """Parse a session log; ParseError/VersionError carry the offending
    1-based line number."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    session: Session | None = None
    status: str | None = None
    last_content = 0
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        last_content = lineno
        if status is not None:
            raise ParseError("content after session_end", line=lineno)
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed record: {exc.msg}", line=lineno) from exc
        if not isinstance(doc, dict) or "type" not in doc:
            raise ParseError("record must be an object with a 'type' field", line=lineno)
        if "v" not in doc:
            raise ParseError("record lacks the format version field 'v'", line=lineno)
        if doc["v"] != FORMAT_VERSION:
            raise VersionError(f"unsupported log version {doc['v']!r}", line=lineno)
        rtype = doc["type"]
        if session is None:
            if rtype != "session_start":
                raise ParseError(f"log must open with session_start, got {rtype!r}", line=lineno)
            try:
                device = serde.device_from_jsonable(doc["device"])
                plan = serde.plan_from_jsonable(doc["plan"])
            except (KeyError, ValueError) as exc:
                raise ParseError(f"bad session_start: {exc}", line=lineno) from exc
            session = Session(str(doc.get("session", "")), device, plan)
            continue
        if rtype == "metrics":
            trial_id = doc.get("trial")
            if trial_id not in session.record.trials:
                raise ParseError(f"metrics for unknown trial {trial_id!r}", line=lineno)
            payload = doc.get("payload")
            if not isinstance(payload, dict):
                raise ParseError("metrics payload must be an object", line=lineno)
            session.record.trial_metrics[trial_id] = payload
        elif rtype == "session_end":
            status = doc.get("status")
            if status not in ("open", "closed", "aborted"):
                raise ParseError(f"bad session status {status!r}", line=lineno)
        else:
            try:
                session.ingest(doc)
            except ProtocolError as exc:
                raise ParseError(str(exc), line=lineno) from exc
    if session is None:
        raise ParseError("empty log", line=1)
    if status is None:
        raise ParseError("truncated log: missing session_end", line=last_content + 1)
    session.record.status = status
    return session.record


# ---------------------------------------------------------------------------
# comparison report


@dataclass(frozen=True)
class ClassSummary:
    """All aggregates for one (device, task class) cell, with the source
    session ids for traceability."""

    device: str
    task_class: str
    n_trials: int
    sessions: tuple[str, ...]
    fit: FitResult | None = None
    error_rate: float | None = None
    timing_sd_by_tempo: tuple[tuple[float, float], ...] = ()
    feature: dict | None = None
    learnability_alpha: float | None = None
    explorability_coverage: float | None = None

    @property
    def ip(self) -> float | None:
        return self.fit.ip if self.fit is not None else None


@dataclass(frozen=True)
class ComparisonReport:
    cells: tuple[ClassSummary, ...]
    rankings: tuple[tuple[str, tuple[str, ...]], ...]  # (task class, devices best-first)
    model: str

    def to_jsonable(self) -> dict:
        cells = []
        for c in self.cells:
            fit = None
            if c.fit is not None:
                fit = {
                    "a": c.fit.params.a,
                    "b": c.fit.params.b,
                    "n": c.fit.params.n,
                    "r_squared": c.fit.r_squared,
                    "sse": c.fit.sse,
                    "n_points": c.fit.n_points,
                    "ip": c.fit.ip,
                }
            cells.append({
                "device": c.device,
                "task_class": c.task_class,
                "n_trials": c.n_trials,
                "sessions": list(c.sessions),
                "fit": fit,
                "error_rate": c.error_rate,
                "timing_sd_by_tempo": [[tempo, sd] for tempo, sd in c.timing_sd_by_tempo],
                "feature": c.feature,
                "learnability_alpha": c.learnability_alpha,
                "explorability_coverage": c.explorability_coverage,
            })
        return {
            "model": self.model,
            "cells": cells,
            "rankings": [[cls, list(devs)] for cls, devs in self.rankings],
        }

    def to_text(self) -> str:
        def fmt(value, digits=4):
            return "-" if value is None else f"{value:.{digits}f}"

        lines = [f"controller comparison (model: {self.model})", ""]
        for cls in TASK_CLASSES:
            cls_cells = [c for c in self.cells if c.task_class == cls]
            if not cls_cells:
                continue
            lines.append(f"== {cls} ==")
            header = f"{'device':<20} {'trials':>6} {'ip':>9} {'r^2':>7} {'err':>6} {'alpha':>7} {'cover':>6}"
            lines.append(header)
            for c in cls_cells:
                lines.append(
                    f"{c.device:<20} {c.n_trials:>6} {fmt(c.ip):>9} "
                    f"{fmt(c.fit.r_squared if c.fit else None):>7} {fmt(c.error_rate):>6} "
                    f"{fmt(c.learnability_alpha):>7} {fmt(c.explorability_coverage, 3):>6}"
                )
                if c.timing_sd_by_tempo:
                    per_tempo = ", ".join(f"{tempo:g} bpm: {sd:.4f} s" for tempo, sd in c.timing_sd_by_tempo)
                    lines.append(f"{'':<20}   timing sd  {per_tempo}")
            ranking = dict(self.rankings).get(cls)
            if ranking:
                lines.append(f"ranking by ip: {' > '.join(ranking)}")
            lines.append("")
        return "\n".join(lines)


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _condition_observations(pairs: Sequence[tuple[float, float]]) -> list[Observation]:
    """Per-condition means: pairs of (difficulty, time) for hit trials."""
    by_difficulty: dict[float, list[float]] = {}
    for difficulty, time in pairs:
        by_difficulty.setdefault(difficulty, []).append(time)
    return [Observation(d, _mean(ts)) for d, ts in sorted(by_difficulty.items())]


def _block_means(entries: Sequence[tuple[int, float]], n_blocks: int) -> list[float] | None:
    by_block: dict[int, list[float]] = {}
    for block, time in entries:
        by_block.setdefault(block, []).append(time)
    if len(by_block) != n_blocks or n_blocks < 2:
        return None
    means = [_mean(by_block[b]) for b in range(n_blocks)]
    if any(m <= 0 for m in means):
        return None
    return means


def comparison_report(sessions: Sequence[SessionRecord], model: str = "fitts") -> ComparisonReport:
    """Aggregate closed sessions into per-device, per-task-class summaries
    and rank devices by index of performance (undefined ip sorts last).
    Deterministic and invariant to session order."""
    if model not in ("fitts", "meyer"):
        raise DomainError(f"model must be 'fitts' or 'meyer', got {model!r}")
    if not sessions:
        raise DomainError("comparison needs at least one closed session")
    for record in sessions:
        if record.status != "closed":
            raise DomainError(f"session {record.session_id!r} is not closed")

    ordered = sorted(sessions, key=lambda r: (r.device.name, r.session_id))
    grouped: dict[str, list[SessionRecord]] = {}
    for record in ordered:
        grouped.setdefault(record.device.name, []).append(record)

    cells: list[ClassSummary] = []
    for device_name in sorted(grouped):
        per_class: dict[str, dict] = {}
        for record in grouped[device_name]:
            ids = record.plan.trial_ids
            for index, (task, trial_id) in enumerate(zip(record.plan.trials, ids)):
                if trial_id not in record.trials:
                    continue
                metric = record.trial_metrics.get(trial_id)
                if metric is None:
                    continue
                cls = task_class(task)
                bucket = per_class.setdefault(cls, {
                    "n": 0, "sessions": set(), "obs": [], "hits": [],
                    "blocks": [], "timing": [], "feature": [], "samples": [],
                })
                bucket["n"] += 1
                bucket["sessions"].add(record.session_id)
                block = record.plan.block_of(index)
                if metric["kind"] == "movement":
                    hit = bool(metric["hit"])
                    bucket["hits"].append(hit)
                    if hit and metric["mt"] is not None:
                        if model == "meyer" and isinstance(task, AcquisitionTask) and task.width > 0:
                            difficulty = task.amplitude / task.width
                        else:
                            difficulty = metric["difficulty"]
                        bucket["obs"].append((difficulty, metric["mt"]))
                        bucket["blocks"].append((block, metric["mt"]))
                elif metric["kind"] == "steering":
                    done = bool(metric["completed"])
                    bucket["hits"].append(done)
                    if done and metric["time"] > 0:
                        bucket["obs"].append((metric["difficulty"], metric["time"]))
                        bucket["blocks"].append((block, metric["time"]))
                elif metric["kind"] == "timing":
                    if metric.get("tempo") is not None and metric.get("sd_asynchrony") is not None:
                        bucket["timing"].append((metric["tempo"], metric["sd_asynchrony"]))
                elif metric["kind"] == "feature":
                    bucket["feature"].append(metric)
                    trial = record.trials[trial_id]
                    bucket["samples"].extend(s.values[0] for s in trial.samples if s.values)

        for cls, bucket in sorted(per_class.items()):
            fit = None
            observations = _condition_observations(bucket["obs"])
            if len(observations) >= 2:
                fit = fit_meyer(observations) if model == "meyer" else fit_linear_law(observations)
            err = None
            if bucket["hits"]:
                err = (len(bucket["hits"]) - sum(bucket["hits"])) / len(bucket["hits"])
            timing: dict[float, list[float]] = {}
            for tempo, sd in bucket["timing"]:
                timing.setdefault(tempo, []).append(sd)
            timing_by_tempo = tuple((tempo, _mean(sds)) for tempo, sds in sorted(timing.items()))
            feature = None
            if bucket["feature"]:
                resolutions = [m["resolution"] for m in bucket["feature"] if m["resolution"] is not None]
                feature = {
                    "accuracy": _mean([m["accuracy"] for m in bucket["feature"]]),
                    "resolution": min(resolutions) if resolutions else None,
                    "range": _mean([m["range"] for m in bucket["feature"]]),
                }
            alpha = None
            n_blocks = grouped[device_name][0].plan.n_blocks
            means = _block_means(bucket["blocks"], n_blocks)
            if means is not None:
                alpha = learnability_fit(means).alpha
            coverage = None
            if bucket["samples"]:
                lo, hi = min(bucket["samples"]), max(bucket["samples"])
                if hi == lo:
                    hi = lo + 1.0
                score = explorability_score([(v,) for v in bucket["samples"]], [(16, lo, hi)])
                coverage = score.coverage
            cells.append(ClassSummary(
                device=device_name,
                task_class=cls,
                n_trials=bucket["n"],
                sessions=tuple(sorted(bucket["sessions"])),
                fit=fit,
                error_rate=err,
                timing_sd_by_tempo=timing_by_tempo,
                feature=feature,
                learnability_alpha=alpha,
                explorability_coverage=coverage,
            ))

    rankings = []
    for cls in TASK_CLASSES:
        cls_cells = [c for c in cells if c.task_class == cls]
        if not cls_cells:
            continue
        ranked = sorted(cls_cells, key=lambda c: (c.ip is None, -(c.ip or 0.0), c.device))
        rankings.append((cls, tuple(c.device for c in ranked)))
    return ComparisonReport(tuple(cells), tuple(rankings), model)
