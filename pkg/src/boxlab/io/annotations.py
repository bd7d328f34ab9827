"""The annotation interchange format and ground-truth import."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import InvalidBoxError, SchemaError
from ..types import Box3D, ClassLabel, Vec3

FORMAT_VERSION = 1


@dataclass
class AnnotationFile:
    """All labels of one sequence: frame index -> boxes on that frame."""

    sequence_id: str
    frame_annotations: dict[int, list[Box3D]] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def all_boxes(self):
        """Iterate (frame_index, box) pairs ordered by (frame, track)."""
        for frame in sorted(self.frame_annotations):
            for box in sorted(self.frame_annotations[frame], key=lambda b: b.track_id):
                yield frame, box

    def box_count(self) -> int:
        return sum(len(v) for v in self.frame_annotations.values())

    def track_classes(self) -> dict[int, ClassLabel]:
        """Class of each track; raises SchemaError if a track changes class."""
        out: dict[int, ClassLabel] = {}
        for frame, box in self.all_boxes():
            seen = out.get(box.track_id)
            if seen is None:
                out[box.track_id] = box.class_label
            elif seen != box.class_label:
                raise SchemaError(
                    f"track {box.track_id} changes class from {seen.value} "
                    f"to {box.class_label.value} at frame {frame}"
                )
        return out

    def validate(self) -> None:
        if self.format_version != FORMAT_VERSION:
            raise SchemaError(f"unsupported format_version {self.format_version!r}")
        for frame, boxes in self.frame_annotations.items():
            if frame < 0:
                raise SchemaError(f"negative frame index {frame}")
            tracks = [b.track_id for b in boxes]
            if len(set(tracks)) != len(tracks):
                dupes = sorted({t for t in tracks if tracks.count(t) > 1})
                raise SchemaError(f"frame {frame}: duplicate track ids {dupes}")
        self.track_classes()


def annotation_document(file: AnnotationFile) -> dict:
    """The canonical document form: rows sorted by (frame, track_id)."""
    rows = []
    for frame, box in file.all_boxes():
        rows.append(
            {
                "frame": frame,
                "track_id": box.track_id,
                "class": box.class_label.value,
                "center": [box.center.x, box.center.y, box.center.z],
                "dims": [box.dims.x, box.dims.y, box.dims.z],
                "yaw": box.yaw,
            }
        )
    return {
        "format_version": file.format_version,
        "sequence_id": file.sequence_id,
        "annotations": rows,
    }


def annotation_bytes(file: AnnotationFile) -> bytes:
    """Canonical serialization; identical input yields identical bytes.

    json's float repr is shortest-round-trip, so load(save(x)) == x
    field-exact.
    """
    return (json.dumps(annotation_document(file), indent=2) + "\n").encode("utf-8")


def _parse_triple(entry: dict, key: str, where: str) -> Vec3:
    value = entry.get(key)
    if (
        not isinstance(value, list)
        or len(value) != 3
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise SchemaError(f"{where}: {key} must be 3 numbers")
    try:
        return Vec3(float(value[0]), float(value[1]), float(value[2]))
    except InvalidBoxError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _parse_row(entry, position: int) -> tuple[int, Box3D]:
    where = f"annotations[{position}]"
    if not isinstance(entry, dict):
        raise SchemaError(f"{where}: expected an object")
    frame = entry.get("frame")
    if not isinstance(frame, int) or isinstance(frame, bool) or frame < 0:
        raise SchemaError(f"{where}: frame must be a non-negative integer")
    track_id = entry.get("track_id")
    if not isinstance(track_id, int) or isinstance(track_id, bool) or track_id < 0:
        raise SchemaError(f"{where}: track_id must be a non-negative integer")
    raw_class = entry.get("class")
    try:
        label = ClassLabel(raw_class)
    except ValueError:
        raise SchemaError(f"{where}: unknown class {raw_class!r}") from None
    center = _parse_triple(entry, "center", where)
    dims = _parse_triple(entry, "dims", where)
    yaw = entry.get("yaw")
    if not isinstance(yaw, (int, float)) or isinstance(yaw, bool) or not math.isfinite(yaw):
        raise SchemaError(f"{where}: yaw must be a finite number")
    try:
        box = Box3D(center=center, dims=dims, yaw=float(yaw), class_label=label, track_id=track_id)
    except InvalidBoxError as exc:
        raise SchemaError(f"{where}: {exc}") from exc
    return frame, box


def annotation_file_from_document(doc, source: str = "<memory>") -> AnnotationFile:
    if not isinstance(doc, dict):
        raise SchemaError(f"{source}: top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise SchemaError(f"{source}: unsupported format_version {version!r}")
    sequence_id = doc.get("sequence_id")
    if not isinstance(sequence_id, str) or not sequence_id:
        raise SchemaError(f"{source}: sequence_id must be a non-empty string")
    rows = doc.get("annotations")
    if not isinstance(rows, list):
        raise SchemaError(f"{source}: annotations must be a list")
    frame_annotations: dict[int, list[Box3D]] = {}
    for position, entry in enumerate(rows):
        frame, box = _parse_row(entry, position)
        frame_annotations.setdefault(frame, []).append(box)
    out = AnnotationFile(sequence_id=sequence_id, frame_annotations=frame_annotations)
    out.validate()
    return out


def save_annotations(file: AnnotationFile, path) -> None:
    """Atomically write the canonical document for `file` to `path`."""
    file.validate()
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(annotation_bytes(file))
    os.replace(tmp, path)


def load_annotations(path) -> AnnotationFile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: not a valid document ({exc})") from exc
    return annotation_file_from_document(doc, source=str(path))


# Columns of the flat external ground-truth table, in order.
_EXTERNAL_COLUMNS = ("frame", "class", "cx", "cy", "cz", "l", "w", "h", "yaw", "track")


def _parse_external_row(parts: list[str], lineno: int) -> tuple[int, Box3D]:
    where = f"row {lineno}"
    if len(parts) != len(_EXTERNAL_COLUMNS):
        raise SchemaError(
            f"{where}: expected {len(_EXTERNAL_COLUMNS)} fields "
            f"{','.join(_EXTERNAL_COLUMNS)}, got {len(parts)}"
        )
    try:
        frame = int(parts[0])
        cx, cy, cz = float(parts[2]), float(parts[3]), float(parts[4])
        l, w, h = float(parts[5]), float(parts[6]), float(parts[7])
        yaw = float(parts[8])
        track = int(parts[9])
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc
    if frame < 0:
        raise SchemaError(f"{where}: negative frame index {frame}")
    try:
        label = ClassLabel(parts[1])
    except ValueError:
        raise SchemaError(f"{where}: unknown class {parts[1]!r}") from None
    try:
        box = Box3D(
            center=Vec3(cx, cy, cz),
            dims=Vec3(l, w, h),
            yaw=yaw,
            class_label=label,
            track_id=track,
        )
    except InvalidBoxError as exc:
        raise SchemaError(f"{where}: {exc}") from exc
    return frame, box


def import_ground_truth(path, schema: str = "native", sequence_id: str = "") -> AnnotationFile:
    """Read ground-truth labels in the native format or a flat box table.

    schema "native" is exactly load_annotations. schema "external-boxes" is
    a comma-separated table with columns frame, class, cx, cy, cz, l, w, h,
    yaw, track (an optional header row repeating the column names is
    skipped); yaw is wrapped to (-pi, pi].
    """
    if schema == "native":
        return load_annotations(path)
    if schema != "external-boxes":
        raise SchemaError(f"unknown ground-truth schema {schema!r}")
    path = Path(path)
    frame_annotations: dict[int, list[Box3D]] = {}
    lines = path.read_text(encoding="utf-8").splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if lineno == 1 and parts[0].lower() == "frame":
            continue
        frame, box = _parse_external_row(parts, lineno)
        frame_annotations.setdefault(frame, []).append(box)
    out = AnnotationFile(
        sequence_id=sequence_id or path.stem,
        frame_annotations=frame_annotations,
    )
    out.validate()
    return out
