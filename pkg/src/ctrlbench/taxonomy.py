"""Morphological design space for controllers.

Each controller is described by the independent physical variables it
senses: a property (position or force, absolute or first-derivative), a
linear or rotary geometry (rotary position reads as angle, rotary force as
torque), the axis of action, a resolution, and a `group` label naming the
composed transducer the dimension belongs to. Dimensions that one
transducer senses together form a group; groups drive the integral /
separable matching rule against task structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .errors import CapacityError, ValidationError

PROPERTIES = ("position", "delta-position", "force", "delta-force")
GEOMETRIES = ("linear", "rotary")
AXES = ("X", "Y", "Z", "rX", "rY", "rZ")
CONTINUOUS = "continuous"

# fixed chart row order: absolute variables first, then their derivatives,
# each as linear then rotary
_ROW_ORDER = (
    ("position", "linear"),
    ("position", "rotary"),
    ("force", "linear"),
    ("force", "rotary"),
    ("delta-position", "linear"),
    ("delta-position", "rotary"),
    ("delta-force", "linear"),
    ("delta-force", "rotary"),
)

_ROW_LABELS = {
    ("position", "linear"): "linear position",
    ("position", "rotary"): "rotary position (angle)",
    ("force", "linear"): "linear force",
    ("force", "rotary"): "rotary force (torque)",
    ("delta-position", "linear"): "linear delta-position",
    ("delta-position", "rotary"): "rotary delta-position",
    ("delta-force", "linear"): "linear delta-force",
    ("delta-force", "rotary"): "rotary delta-force",
}


@dataclass(frozen=True)
class SenseDimension:
    property: str
    geometry: str
    axis: str
    resolution: int | str = CONTINUOUS
    group: str = ""

    def __post_init__(self):
        if self.property not in PROPERTIES:
            raise ValidationError(f"unknown property {self.property!r}; expected one of {PROPERTIES}")
        if self.geometry not in GEOMETRIES:
            raise ValidationError(f"unknown geometry {self.geometry!r}; expected one of {GEOMETRIES}")
        if self.axis not in AXES:
            raise ValidationError(f"unknown axis {self.axis!r}; expected one of {AXES}")
        if self.resolution != CONTINUOUS:
            if isinstance(self.resolution, bool) or not isinstance(self.resolution, int):
                raise ValidationError(f"resolution must be an integer or {CONTINUOUS!r}, got {self.resolution!r}")
            if self.resolution < 2:
                raise ValidationError(f"finite resolution must be >= 2, got {self.resolution}")

    def cell(self) -> tuple[str, str, str]:
        return (self.property, self.geometry, self.axis)


@dataclass(frozen=True)
class DeviceDescriptor:
    name: str
    dimensions: tuple[SenseDimension, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        if not self.name:
            raise ValidationError("device name must be non-empty")
        seen = set()
        for dim in self.dimensions:
            key = (dim.property, dim.geometry, dim.axis, dim.group)
            if key in seen:
                raise ValidationError(f"duplicate dimension {key} in device {self.name!r}")
            seen.add(key)


@dataclass(frozen=True)
class TaskStructure:
    """Perceptual structure of a task: its attributes, and whether they are
    perceived combined (integral) or distinct (separable)."""

    attributes: tuple[str, ...]
    structure: str

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if not self.attributes:
            raise ValidationError("task needs at least one attribute")
        if self.structure not in ("integral", "separable"):
            raise ValidationError(f"structure must be 'integral' or 'separable', got {self.structure!r}")


def degrees_of_freedom(device: DeviceDescriptor) -> int:
    """Number of independent physical variables the device senses."""
    return len(device.dimensions)


def _group_key(dim: SenseDimension) -> str:
    # an empty group label means the dimension stands alone as its own
    # transducer; only named groups compose dimensions
    return dim.group if dim.group else f"{dim.geometry} {dim.property} {dim.axis}"


# ---------------------------------------------------------------------------
# chart


@dataclass(frozen=True)
class Chart:
    """Deterministic grid of (device, resolution) markers: rows are
    property × geometry, columns the six axes."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: tuple[tuple[tuple[str, ...], ...], ...]  # [row][col] -> markers

    def to_text(self) -> str:
        header = [""] + list(self.col_labels)
        rows = [header]
        for label, row in zip(self.row_labels, self.cells):
            rows.append([label] + ["; ".join(cell) for cell in row])
        widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
        lines = []
        for i, row in enumerate(rows):
            line = " | ".join(cell.ljust(w) for cell, w in zip(row, widths))
            lines.append(line.rstrip())
            if i == 0:
                lines.append("-+-".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def to_svg(self, cell_w: int = 150, cell_h: int = 56) -> str:
        left, top = 190, 40
        n_rows, n_cols = len(self.row_labels), len(self.col_labels)
        width = left + n_cols * cell_w + 10
        height = top + n_rows * cell_h + 10
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'font-family="monospace" font-size="12">'
        ]
        for c, label in enumerate(self.col_labels):
            out.append(f'<text x="{left + c * cell_w + cell_w // 2}" y="{top - 14}" '
                       f'text-anchor="middle">{label}</text>')
        for r, label in enumerate(self.row_labels):
            out.append(f'<text x="{left - 10}" y="{top + r * cell_h + cell_h // 2}" '
                       f'text-anchor="end">{label}</text>')
        for r in range(n_rows + 1):
            y = top + r * cell_h
            out.append(f'<line x1="{left}" y1="{y}" x2="{left + n_cols * cell_w}" y2="{y}" stroke="black"/>')
        for c in range(n_cols + 1):
            x = left + c * cell_w
            out.append(f'<line x1="{x}" y1="{top}" x2="{x}" y2="{top + n_rows * cell_h}" stroke="black"/>')
        for r, row in enumerate(self.cells):
            for c, markers in enumerate(row):
                for k, marker in enumerate(markers):
                    out.append(f'<text x="{left + c * cell_w + 6}" y="{top + r * cell_h + 16 + k * 14}">'
                               f'{marker}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _marker(name: str, resolution: int | str) -> str:
    res = "cont" if resolution == CONTINUOUS else str(resolution)
    return f"{name}({res})"


def build_chart(devices: Sequence[DeviceDescriptor]) -> Chart:
    """Place every sensed dimension of every device on the fixed grid.
    Output is deterministic: markers sort lexicographically, so any input
    order yields byte-identical renderings."""
    names = [d.name for d in devices]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise ValidationError(f"duplicate device names: {dupes}")
    grid: dict[tuple[str, str, str], list[tuple[str, str]]] = {}
    for device in devices:
        for dim in device.dimensions:
            grid.setdefault(dim.cell(), []).append((device.name, _marker(device.name, dim.resolution)))
    cells = []
    for prop, geom in _ROW_ORDER:
        row = []
        for axis in AXES:
            markers = sorted(grid.get((prop, geom, axis), []))
            row.append(tuple(m for _, m in markers))
        cells.append(tuple(row))
    row_labels = tuple(_ROW_LABELS[key] for key in _ROW_ORDER)
    return Chart(row_labels, tuple(AXES), tuple(cells))


# ---------------------------------------------------------------------------
# integrality / separability


@dataclass(frozen=True)
class ControlStructure:
    """Per-group verdicts plus a one-line summary, groups sorted by name."""

    groups: tuple[tuple[str, str], ...]  # (group name, "integral" | "separable")
    summary: str


def classify_control_structure(device: DeviceDescriptor) -> ControlStructure:
    """A group sensing two or more dimensions together is integral; a group
    sensing a single dimension (including every ungrouped dimension) is
    separable."""
    sizes: dict[str, int] = {}
    for dim in device.dimensions:
        key = _group_key(dim)
        sizes[key] = sizes.get(key, 0) + 1
    verdicts = tuple(
        (group, "integral" if count >= 2 else "separable")
        for group, count in sorted(sizes.items())
    )
    summary = "; ".join(f"{g}: {v}" for g, v in verdicts) or "(no dimensions)"
    return ControlStructure(verdicts, summary)


@dataclass(frozen=True)
class MatchReport:
    matched: bool
    assignment: tuple[tuple[str, str], ...] = ()  # (attribute, dimension label)
    reason: str = ""


def _dim_label(dim: SenseDimension) -> str:
    return f"{dim.geometry} {dim.property} {dim.axis} [{dim.group or 'ungrouped'}]"


def match_device_to_task(device: DeviceDescriptor, task: TaskStructure) -> MatchReport:
    """Match verdict: the task's attributes must be assignable to device
    dimensions so that an integral task lands entirely within one group and
    a separable task lands in pairwise distinct groups. The report carries
    a witness assignment or the failure reason."""
    k = len(task.attributes)
    if k > degrees_of_freedom(device):
        raise CapacityError(
            f"task has {k} attributes but device {device.name!r} senses "
            f"{degrees_of_freedom(device)} dimensions"
        )
    by_group: dict[str, list[SenseDimension]] = {}
    for dim in device.dimensions:
        by_group.setdefault(_group_key(dim), []).append(dim)

    if task.structure == "integral":
        for group in sorted(by_group):
            dims = by_group[group]
            if len(dims) >= k:
                assignment = tuple(
                    (attr, _dim_label(dim)) for attr, dim in zip(task.attributes, dims)
                )
                return MatchReport(True, assignment)
        return MatchReport(
            False,
            reason=f"no transducer group senses {k} dimensions together",
        )

    if len(by_group) >= k:
        groups = sorted(by_group)[:k]
        assignment = tuple(
            (attr, _dim_label(by_group[g][0])) for attr, g in zip(task.attributes, groups)
        )
        return MatchReport(True, assignment)
    return MatchReport(
        False,
        reason=f"device has only {len(by_group)} distinct groups for {k} separable attributes",
    )


# ---------------------------------------------------------------------------
# descriptor files

_DEVICE_FIELDS = {"name", "dimensions"}
_DIMENSION_FIELDS = {"property", "geometry", "axis", "resolution", "group"}


def parse_device(text: str) -> DeviceDescriptor:
    """Parse a UTF-8 JSON device descriptor; unknown fields are rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"device descriptor is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("device descriptor must be a JSON object")
    unknown = set(doc) - _DEVICE_FIELDS
    if unknown:
        raise ValidationError(f"unknown device fields: {sorted(unknown)}")
    if "name" not in doc or "dimensions" not in doc:
        raise ValidationError("device descriptor needs 'name' and 'dimensions'")
    if not isinstance(doc["dimensions"], list):
        raise ValidationError("'dimensions' must be an array")
    dims = []
    for i, entry in enumerate(doc["dimensions"]):
        if not isinstance(entry, dict):
            raise ValidationError(f"dimension {i} must be an object")
        unknown = set(entry) - _DIMENSION_FIELDS
        if unknown:
            raise ValidationError(f"dimension {i}: unknown fields {sorted(unknown)}")
        missing = _DIMENSION_FIELDS - set(entry)
        if missing:
            raise ValidationError(f"dimension {i}: missing fields {sorted(missing)}")
        dims.append(SenseDimension(
            property=entry["property"],
            geometry=entry["geometry"],
            axis=entry["axis"],
            resolution=entry["resolution"],
            group=entry["group"],
        ))
    return DeviceDescriptor(doc["name"], tuple(dims))


def load_device(path) -> DeviceDescriptor:
    with open(path, encoding="utf-8") as fh:
        return parse_device(fh.read())
