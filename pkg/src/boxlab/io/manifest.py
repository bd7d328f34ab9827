"""Sequence manifests: frame listings plus camera calibrations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import InvalidBoxError, ManifestError
from ..types import CameraModel


@dataclass(frozen=True)
class FrameRecord:
    """One frame of a sequence: a point cloud plus one image per camera."""

    index: int
    timestamp: int  # microseconds since epoch
    pointcloud_path: str
    image_paths: dict[str, str]


@dataclass
class SequenceManifest:
    sequence_id: str
    frame_count: int
    frames: list[FrameRecord]
    cameras: list[CameraModel]
    # Directory the manifest was loaded from; relative paths resolve here.
    root: Path = field(default_factory=Path)

    @property
    def camera_names(self) -> list[str]:
        return [c.name for c in self.cameras]

    def camera(self, name: str) -> CameraModel:
        for c in self.cameras:
            if c.name == name:
                return c
        raise KeyError(name)

    def resolve(self, relative: str) -> Path:
        return self.root / relative


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise ManifestError("malformed", f"{where}: missing key {key!r}", field=f"{where}.{key}")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ManifestError("malformed", f"{where}.{key}: expected a number", field=f"{where}.{key}")
        return float(value)
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ManifestError("malformed", f"{where}.{key}: expected an integer", field=f"{where}.{key}")
        return value
    if not isinstance(value, kind):
        raise ManifestError(
            "malformed",
            f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}",
            field=f"{where}.{key}",
        )
    return value


def _number_list(doc: dict, key: str, length: int, where: str) -> list:
    value = _require(doc, key, list, where)
    if len(value) != length or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ManifestError(
            "malformed",
            f"{where}.{key}: expected {length} numbers",
            field=f"{where}.{key}",
        )
    return [float(v) for v in value]


def _parse_camera(entry, where: str) -> CameraModel:
    if not isinstance(entry, dict):
        raise ManifestError("malformed", f"{where}: expected an object", field=where)
    name = _require(entry, "name", str, where)
    if not name:
        raise ManifestError("malformed", f"{where}.name: empty camera name", field=f"{where}.name")
    intrinsics = _number_list(entry, "intrinsics", 9, where)
    rotation = _number_list(entry, "rotation", 9, where)
    translation = _number_list(entry, "translation", 3, where)
    width = _require(entry, "width", int, where)
    height = _require(entry, "height", int, where)
    try:
        return CameraModel(name, intrinsics, rotation, translation, width, height)
    except InvalidBoxError as exc:
        raise ManifestError("invariant", f"camera {name!r}: {exc}", field=name) from exc


def _parse_frame(entry, position: int, camera_names: set[str]) -> FrameRecord:
    where = f"frames[{position}]"
    if not isinstance(entry, dict):
        raise ManifestError("malformed", f"{where}: expected an object", field=where)
    index = _require(entry, "index", int, where)
    timestamp = _require(entry, "timestamp", int, where)
    pointcloud = _require(entry, "pointcloud", str, where)
    images = _require(entry, "images", dict, where)
    if index < 0:
        raise ManifestError("invariant", f"{where}.index: negative frame index {index}", field=f"{where}.index")
    if not pointcloud:
        raise ManifestError("invariant", f"{where}.pointcloud: empty path", field=f"{where}.pointcloud")
    for cam, path in images.items():
        if not isinstance(cam, str) or not isinstance(path, str):
            raise ManifestError("malformed", f"{where}.images: expected string -> string map", field=f"{where}.images")
        if not path:
            raise ManifestError("invariant", f"{where}.images[{cam!r}]: empty path", field=f"{where}.images")
    if set(images) != camera_names:
        missing = sorted(camera_names - set(images))
        extra = sorted(set(images) - camera_names)
        raise ManifestError(
            "invariant",
            f"{where}.images: must reference every declared camera exactly once "
            f"(missing {missing}, undeclared {extra})",
            field=f"{where}.images",
        )
    return FrameRecord(
        index=index,
        timestamp=timestamp,
        pointcloud_path=pointcloud,
        image_paths=dict(images),
    )


def load_manifest(path) -> SequenceManifest:
    """Load and fully validate a sequence manifest document.

    Raises ManifestError with category "missing-file" when the path does not
    exist, "malformed" for parse and type problems, and "invariant" for
    structurally valid documents that break a manifest rule; ``field`` names
    the offending entry.
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError("missing-file", f"manifest not found: {path}", field=str(path))
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ManifestError("malformed", f"{path}: not a valid document ({exc})") from exc
    if not isinstance(doc, dict):
        raise ManifestError("malformed", f"{path}: top level must be an object")

    sequence_id = _require(doc, "sequence_id", str, "manifest")
    if not sequence_id:
        raise ManifestError("malformed", "manifest.sequence_id: empty", field="sequence_id")
    camera_entries = _require(doc, "cameras", list, "manifest")
    frame_entries = _require(doc, "frames", list, "manifest")

    cameras = [_parse_camera(entry, f"cameras[{i}]") for i, entry in enumerate(camera_entries)]
    names = [c.name for c in cameras]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise ManifestError("invariant", f"duplicate camera names: {dupes}", field="cameras")

    if not frame_entries:
        raise ManifestError("invariant", "manifest declares no frames", field="frames")
    camera_names = set(names)
    frames = [_parse_frame(entry, i, camera_names) for i, entry in enumerate(frame_entries)]
    for position, record in enumerate(frames):
        # Strictly ordered and 0-based together pin index = position.
        if record.index != position:
            raise ManifestError(
                "invariant",
                f"frames[{position}].index: expected {position}, got {record.index} "
                "(frames must be 0-based and strictly ordered)",
                field=f"frames[{position}].index",
            )

    return SequenceManifest(
        sequence_id=sequence_id,
        frame_count=len(frames),
        frames=frames,
        cameras=cameras,
        root=path.parent,
    )
