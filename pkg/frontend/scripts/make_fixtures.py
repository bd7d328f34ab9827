"""Regenerate tests/fixtures/overlay_fixtures.json from the live backend.

Builds a throwaway sequence with the standard six-camera ring rig, PUTs
50 boxes through the HTTP API, reads back every /projections response,
and freezes the lot. The frontend's overlay math is tested against these
bytes, so regenerate only when the backend's projection contract changes:

    python3 scripts/make_fixtures.py
"""
import json
import math
import struct
import sys
import tempfile
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from boxlab.server import create_app

CLASSES = ["CAR", "PEDESTRIAN", "MOTORCYCLE", "BICYCLE", "TRUCK"]


def ring_camera(name: str, azimuth: float) -> dict:
    """One outward-looking camera, 0.3 m from the origin at 1.6 m height."""
    z_cam = np.array([math.cos(azimuth), math.sin(azimuth), 0.0])
    x_cam = np.array([math.sin(azimuth), -math.cos(azimuth), 0.0])
    y_cam = np.array([0.0, 0.0, -1.0])
    rotation = np.stack([x_cam, y_cam, z_cam])
    center = 0.3 * z_cam + np.array([0.0, 0.0, 1.6])
    translation = -rotation @ center
    return {
        "name": name,
        "intrinsics": [800.0, 0.0, 640.0, 0.0, 800.0, 360.0, 0.0, 0.0, 1.0],
        "rotation": [float(v) for v in rotation.reshape(-1)],
        "translation": [float(v) for v in translation],
        "width": 1280,
        "height": 720,
    }


def write_sequence(root: Path, cameras: list[dict], n_frames: int) -> None:
    seq = root / "fix"
    (seq / "pointclouds").mkdir(parents=True)
    manifest = {
        "sequence_id": "fix",
        "cameras": cameras,
        "frames": [
            {
                "index": i,
                "timestamp": 1_700_000_000_000_000 + i * 100_000,
                "pointcloud": f"pointclouds/{i:04d}.bin",
                "images": {c["name"]: f"images/{c['name']}/{i:04d}.png" for c in cameras},
            }
            for i in range(n_frames)
        ],
    }
    (seq / "manifest.json").write_text(json.dumps(manifest, indent=2))
    for i in range(n_frames):
        payload = struct.pack("<4f", 1.0, 2.0, 0.0, 0.5)
        (seq / "pointclouds" / f"{i:04d}.bin").write_bytes(payload)
    for cam in cameras:
        cam_dir = seq / "images" / cam["name"]
        cam_dir.mkdir(parents=True)
        for i in range(n_frames):
            (cam_dir / f"{i:04d}.png").write_bytes(b"\x89PNG\r\n\x1a\n")


def sample_boxes(rng: np.random.Generator) -> list[dict]:
    """50 boxes covering the interesting regimes: fully visible, straddling
    the near plane, clipped at the image border, and invisible."""
    boxes = []

    def add(center, dims, yaw, cls):
        boxes.append(
            {
                "class": cls,
                "center": [float(v) for v in center],
                "dims": [float(v) for v in dims],
                "yaw": float(yaw),
            }
        )

    # Scattered around the rig at comfortable range.
    for k in range(35):
        radius = rng.uniform(4.0, 30.0)
        azimuth = rng.uniform(-math.pi, math.pi)
        add(
            (radius * math.cos(azimuth), radius * math.sin(azimuth), rng.uniform(-0.3, 1.2)),
            (rng.uniform(0.6, 8.0), rng.uniform(0.5, 2.6), rng.uniform(0.8, 3.4)),
            rng.uniform(-math.pi, math.pi),
            CLASSES[k % len(CLASSES)],
        )
    # Hugging the cameras: corners on both sides of the near plane.
    for k in range(5):
        azimuth = k * 2.0 * math.pi / 5.0 + 0.1
        add(
            (1.0 * math.cos(azimuth), 1.0 * math.sin(azimuth), 1.3),
            (2.5, 1.8, 1.6),
            rng.uniform(-math.pi, math.pi),
            "CAR",
        )
    # Tall/wide ones near the image border.
    for k in range(5):
        azimuth = k * 2.0 * math.pi / 5.0 + 0.6
        add(
            (9.0 * math.cos(azimuth), 9.0 * math.sin(azimuth), rng.uniform(2.5, 4.0)),
            (1.0, 1.0, rng.uniform(4.0, 7.0)),
            0.0,
            "PEDESTRIAN",
        )
    # At the hub: behind every camera at once.
    for k in range(5):
        add((0.05 * k, -0.02 * k, 1.6), (0.2, 0.2, 0.2), 0.3 * k, "BICYCLE")
    assert len(boxes) == 50
    return boxes


def main() -> None:
    rng = np.random.default_rng(20260818)
    cameras = [ring_camera(f"cam{i}", i * math.pi / 3.0) for i in range(6)]
    boxes = sample_boxes(rng)

    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        write_sequence(root, cameras, 1)
        with TestClient(create_app(root)) as client:
            rows = [
                {"frame": 0, "track_id": -1, **{k: box[k] for k in ("class", "center", "dims", "yaw")}}
                for box in boxes
            ]
            put = client.put(
                "/api/sequences/fix/frames/0/annotations",
                json={"format_version": 1, "sequence_id": "fix", "annotations": rows},
            )
            put.raise_for_status()
            saved = put.json()["annotations"]
            projections = {}
            for row in saved:
                track = row["track_id"]
                resp = client.get(f"/api/sequences/fix/frames/0/tracks/{track}/projections")
                resp.raise_for_status()
                projections[str(track)] = resp.json()["projections"]

    out = {
        "sequence_id": "fix",
        "cameras": cameras,
        "boxes": saved,
        "projections": projections,
    }
    dest = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "overlay_fixtures.json"
    dest.write_text(json.dumps(out, indent=2) + "\n")
    visible = sum(1 for plist in projections.values() if plist)
    print(f"wrote {dest}")
    print(f"boxes 50, visible somewhere {visible}, camera entries "
          f"{sum(len(p) for p in projections.values())}")


if __name__ == "__main__":
    sys.exit(main())
