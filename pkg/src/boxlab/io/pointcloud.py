"""Point cloud files: binary float32 records with an ASCII fallback."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import PointCloudError

# Each point is 4 little-endian float32 values: x, y, z, intensity.
RECORD_BYTES = 16
ASCII_HEADER = "x y z intensity"


def _check_finite(points: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(points).all(axis=1)
    if bad.any():
        first = int(np.flatnonzero(bad)[0])
        raise PointCloudError(f"{what}: non-finite coordinates at point {first}")


def load_point_cloud(path) -> np.ndarray:
    """Load a point cloud as an (N, 4) float32 array [x, y, z, intensity].

    Binary files are consecutive 16-byte [x, y, z, intensity] float32le
    records. Files that start with the header line "x y z intensity" are
    parsed as ASCII, one point per line.
    """
    path = Path(path)
    data = path.read_bytes()
    if data.lstrip()[: len(ASCII_HEADER)] == ASCII_HEADER.encode("ascii"):
        return _parse_ascii(data, str(path))
    if len(data) % RECORD_BYTES != 0:
        raise PointCloudError(
            f"{path}: truncated payload, {len(data)} bytes is not a multiple of {RECORD_BYTES}"
        )
    points = np.frombuffer(data, dtype="<f4").reshape(-1, 4).copy()
    _check_finite(points, str(path))
    return points


def _parse_ascii(data: bytes, what: str) -> np.ndarray:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise PointCloudError(f"{what}: undecodable ASCII payload") from exc
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines or lines[0] != ASCII_HEADER:
        raise PointCloudError(f"{what}: missing header line {ASCII_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 4:
            raise PointCloudError(f"{what}: line {lineno}: expected 4 values, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise PointCloudError(f"{what}: line {lineno}: {exc}") from exc
    points = np.array(rows, dtype=np.float32).reshape(-1, 4)
    _check_finite(points, what)
    return points


def save_point_cloud(points, path, fmt: str = "binary") -> None:
    """Write an (N, 4) array of [x, y, z, intensity] points.

    fmt "binary" emits float32le records; loading them back reproduces the
    written bytes exactly. fmt "ascii" emits the header line followed by one
    point per line.
    """
    arr = np.asarray(points, dtype=np.float32)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise PointCloudError(f"expected (N, 4) points, got {arr.shape}")
    path = Path(path)
    if fmt == "binary":
        path.write_bytes(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    elif fmt == "ascii":
        lines = [ASCII_HEADER]
        for row in arr:
            # 9 significant digits round-trip any float32 exactly.
            lines.append(" ".join(f"{float(v):.9g}" for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
    else:
        raise ValueError(f"unknown point cloud format {fmt!r}")
