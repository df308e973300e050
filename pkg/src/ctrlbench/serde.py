"""JSON conversion for domain objects.

Serialization is canonical (sorted keys, minimal separators, floats via
repr) so that identical objects always produce identical bytes; log
roundtrips and golden-file tests rely on this.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .battery import AcquisitionTask, MusicalTask, SteeringTask, TrialPlan
from .errors import ParseError, ValidationError
from .metrics import Event, Sample, TrialRecord
from .paths import Arc, PathSpec, Straight
from .taxonomy import DeviceDescriptor, SenseDimension


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# -- paths ------------------------------------------------------------------


def path_to_jsonable(path: PathSpec) -> dict:
    segments = []
    for seg in path.segments:
        if isinstance(seg, Straight):
            segments.append({"kind": "straight", "length": seg.length})
        else:
            segments.append({"kind": "arc", "radius": seg.radius, "angle": seg.angle})
    return {"segments": segments, "width_profile": [[s, w] for s, w in path.width_profile]}


def path_from_jsonable(doc: Mapping) -> PathSpec:
    try:
        segments = []
        for entry in doc["segments"]:
            if entry["kind"] == "straight":
                segments.append(Straight(float(entry["length"])))
            elif entry["kind"] == "arc":
                segments.append(Arc(float(entry["radius"]), float(entry["angle"])))
            else:
                raise ValidationError(f"unknown segment kind {entry['kind']!r}")
        profile = tuple((float(s), float(w)) for s, w in doc["width_profile"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed path document: {exc}") from exc
    return PathSpec(tuple(segments), profile)


# -- tasks ------------------------------------------------------------------


def task_to_jsonable(task) -> dict:
    if isinstance(task, AcquisitionTask):
        return {
            "type": "acquisition",
            "amplitude": task.amplitude,
            "width": task.width,
            "units": task.units,
            "dimensions": task.dimensions,
            "selection": task.selection,
            "dwell_ms": task.dwell_ms,
            "rep": task.rep,
        }
    if isinstance(task, SteeringTask):
        return {
            "type": "steering",
            "path": path_to_jsonable(task.path),
            "difficulty": task.difficulty,
            "rep": task.rep,
        }
    if isinstance(task, MusicalTask):
        return {
            "type": "musical",
            "kind": task.kind,
            "onsets": list(task.onsets),
            "pitches": [list(chord) for chord in task.pitches],
            "tempo": task.tempo,
            "polyphony": task.polyphony,
            "articulation": task.articulation,
            "reference": [[t, v] for t, v in task.reference],
            "params": dict(task.params),
            "rep": task.rep,
        }
    raise ValidationError(f"cannot serialize task of type {type(task).__name__}")


def task_from_jsonable(doc: Mapping):
    kind = doc.get("type")
    try:
        if kind == "acquisition":
            return AcquisitionTask(
                amplitude=float(doc["amplitude"]),
                width=float(doc["width"]),
                units=doc["units"],
                dimensions=int(doc["dimensions"]),
                selection=doc["selection"],
                dwell_ms=None if doc["dwell_ms"] is None else float(doc["dwell_ms"]),
                rep=int(doc["rep"]),
            )
        if kind == "steering":
            return SteeringTask(
                path=path_from_jsonable(doc["path"]),
                difficulty=float(doc["difficulty"]),
                rep=int(doc["rep"]),
            )
        if kind == "musical":
            return MusicalTask(
                kind=doc["kind"],
                onsets=tuple(doc["onsets"]),
                pitches=tuple(tuple(chord) for chord in doc["pitches"]),
                tempo=None if doc["tempo"] is None else float(doc["tempo"]),
                polyphony=int(doc["polyphony"]),
                articulation=doc["articulation"],
                reference=tuple((t, v) for t, v in doc["reference"]),
                params=dict(doc["params"]),
                rep=int(doc["rep"]),
            )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed task document: {exc}") from exc
    raise ValidationError(f"unknown task type {kind!r}")


def plan_to_jsonable(plan: TrialPlan) -> dict:
    return {
        "trials": [task_to_jsonable(t) for t in plan.trials],
        "seed": plan.seed,
        "device": plan.device,
        "n_blocks": plan.n_blocks,
    }


def plan_from_jsonable(doc: Mapping) -> TrialPlan:
    try:
        return TrialPlan(
            trials=tuple(task_from_jsonable(t) for t in doc["trials"]),
            seed=int(doc["seed"]),
            device=doc["device"],
            n_blocks=int(doc["n_blocks"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed plan document: {exc}") from exc


# -- devices ----------------------------------------------------------------


def device_to_jsonable(device: DeviceDescriptor) -> dict:
    return {
        "name": device.name,
        "dimensions": [
            {
                "property": d.property,
                "geometry": d.geometry,
                "axis": d.axis,
                "resolution": d.resolution,
                "group": d.group,
            }
            for d in device.dimensions
        ],
    }


def device_from_jsonable(doc: Mapping) -> DeviceDescriptor:
    try:
        dims = tuple(
            SenseDimension(
                property=d["property"],
                geometry=d["geometry"],
                axis=d["axis"],
                resolution=d["resolution"],
                group=d["group"],
            )
            for d in doc["dimensions"]
        )
        return DeviceDescriptor(doc["name"], dims)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed device document: {exc}") from exc


# -- trial records ----------------------------------------------------------


def event_to_jsonable(event: Event) -> dict:
    doc: dict = {"t": event.t, "kind": event.kind}
    if event.pitch is not None:
        doc["pitch"] = event.pitch
    if event.velocity is not None:
        doc["velocity"] = event.velocity
    if event.position is not None:
        doc["position"] = event.position
    return doc


def event_from_jsonable(doc: Mapping) -> Event:
    try:
        return Event(
            t=float(doc["t"]),
            kind=doc["kind"],
            pitch=None if doc.get("pitch") is None else float(doc["pitch"]),
            velocity=None if doc.get("velocity") is None else float(doc["velocity"]),
            position=None if doc.get("position") is None else float(doc["position"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed event document: {exc}") from exc


def record_to_jsonable(record: TrialRecord) -> dict:
    return {
        "trial_id": record.trial_id,
        "go_signal": record.go_signal,
        "samples": [[s.t, list(s.values)] for s in record.samples],
        "events": [event_to_jsonable(e) for e in record.events],
        "completed": record.completed,
        "aborted": record.aborted,
    }


def record_from_jsonable(doc: Mapping) -> TrialRecord:
    try:
        return TrialRecord(
            trial_id=doc["trial_id"],
            go_signal=float(doc["go_signal"]),
            samples=tuple(Sample(float(t), tuple(vals)) for t, vals in doc["samples"]),
            events=tuple(event_from_jsonable(e) for e in doc["events"]),
            completed=bool(doc["completed"]),
            aborted=bool(doc["aborted"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed trial record: {exc}") from exc


# -- battery / sim spec files -----------------------------------------------


def load_json(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}", line=exc.lineno) from exc
