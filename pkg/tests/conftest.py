"""Shared fixtures: camera rigs, on-disk sequences, box generators."""
from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import settings

from boxlab.io import save_point_cloud
from boxlab.types import Box3D, CameraModel, ClassLabel, Vec3

settings.register_profile("boxlab", deadline=None, max_examples=60)
settings.load_profile("boxlab")

# One line per end-to-end criterion, filled in by test_acceptance and
# printed after the run so the verdicts survive output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_box(
    cx=0.0, cy=0.0, cz=0.0,
    dx=4.0, dy=2.0, dz=1.5,
    yaw=0.0,
    label=ClassLabel.CAR,
    track_id=0,
) -> Box3D:
    return Box3D(Vec3(cx, cy, cz), Vec3(dx, dy, dz), yaw, label, track_id)


def ring_camera(name: str, azimuth: float) -> CameraModel:
    """One camera of a surround rig: optical axis horizontal at `azimuth`.

    Camera center sits 0.3 m from the LiDAR origin along the view
    direction at 1.6 m height; image y points down (world -z).
    """
    z_cam = np.array([math.cos(azimuth), math.sin(azimuth), 0.0])
    x_cam = np.array([math.sin(azimuth), -math.cos(azimuth), 0.0])
    y_cam = np.array([0.0, 0.0, -1.0])
    rotation = np.stack([x_cam, y_cam, z_cam])
    center = 0.3 * z_cam + np.array([0.0, 0.0, 1.6])
    translation = -rotation @ center
    intrinsics = [800.0, 0.0, 640.0, 0.0, 800.0, 360.0, 0.0, 0.0, 1.0]
    return CameraModel(
        name, intrinsics, rotation.reshape(-1).tolist(), translation.tolist(), 1280, 720
    )


@pytest.fixture(scope="session")
def rig6() -> list[CameraModel]:
    """Six cameras covering the full horizon at 60 degree spacing."""
    return [ring_camera(f"cam{i}", i * math.pi / 3.0) for i in range(6)]


def camera_document(cam: CameraModel) -> dict:
    return {
        "name": cam.name,
        "intrinsics": [float(v) for v in cam.intrinsics.reshape(-1)],
        "rotation": [float(v) for v in cam.rotation.reshape(-1)],
        "translation": [float(v) for v in cam.translation.reshape(-1)],
        "width": cam.width,
        "height": cam.height,
    }


def manifest_document(sequence_id: str, n_frames: int, cameras) -> dict:
    return {
        "sequence_id": sequence_id,
        "cameras": [camera_document(c) for c in cameras],
        "frames": [
            {
                "index": i,
                "timestamp": 1_700_000_000_000_000 + i * 100_000,
                "pointcloud": f"pointclouds/{i:04d}.bin",
                "images": {c.name: f"images/{c.name}/{i:04d}.png" for c in cameras},
            }
            for i in range(n_frames)
        ],
    }


def write_sequence_dir(root, sequence_id: str, n_frames: int, cameras, with_payloads=True):
    """Materialize a sequence directory: manifest plus per-frame files."""
    seq_dir = root / sequence_id
    seq_dir.mkdir(parents=True)
    doc = manifest_document(sequence_id, n_frames, cameras)
    (seq_dir / "manifest.json").write_text(json.dumps(doc, indent=2))
    if with_payloads:
        (seq_dir / "pointclouds").mkdir()
        rng = np.random.default_rng(99)
        for i in range(n_frames):
            pts = rng.uniform(-20, 20, (64, 4)).astype(np.float32)
            save_point_cloud(pts, seq_dir / "pointclouds" / f"{i:04d}.bin")
        for cam in cameras:
            cam_dir = seq_dir / "images" / cam.name
            cam_dir.mkdir(parents=True)
            for i in range(n_frames):
                (cam_dir / f"{i:04d}.png").write_bytes(
                    b"\x89PNG\r\n\x1a\n" + f"{cam.name}/{i}".encode()
                )
    return seq_dir


@pytest.fixture()
def toy_sequence(tmp_path, rig6):
    """A 3-frame sequence with two cameras, fully materialized on disk."""
    return write_sequence_dir(tmp_path, "toy", 3, rig6[:2])


def generated_tracks(n_frames: int, seed: int = 7) -> dict[int, list[Box3D]]:
    """Deterministic multi-track scene: boxes moving on straight paths.

    Returns frame -> boxes; roughly a dozen simultaneously visible objects
    per frame across the five classes.
    """
    rng = np.random.default_rng(seed)
    labels = list(ClassLabel)
    dims_by_label = {
        ClassLabel.CAR: (4.2, 1.9, 1.6),
        ClassLabel.PEDESTRIAN: (0.6, 0.6, 1.75),
        ClassLabel.MOTORCYCLE: (2.2, 0.9, 1.4),
        ClassLabel.BICYCLE: (1.8, 0.7, 1.6),
        ClassLabel.TRUCK: (8.5, 2.5, 3.2),
    }
    n_tracks = max(8, n_frames // 12)
    frames: dict[int, list[Box3D]] = {i: [] for i in range(n_frames)}
    for track_id in range(n_tracks):
        label = labels[track_id % len(labels)]
        dx, dy, dz = dims_by_label[label]
        first = int(rng.integers(0, max(1, n_frames - 10)))
        last = min(n_frames - 1, first + int(rng.integers(10, n_frames)))
        start = np.array([rng.uniform(-40, 40), rng.uniform(-40, 40), dz / 2])
        velocity = np.array([rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), 0.0])
        yaw0 = rng.uniform(-math.pi, math.pi)
        yaw_rate = rng.uniform(-0.01, 0.01)
        for frame in range(first, last + 1):
            k = frame - first
            pos = start + velocity * k
            frames[frame].append(
                Box3D(
                    Vec3(float(pos[0]), float(pos[1]), float(pos[2])),
                    Vec3(dx, dy, dz),
                    yaw0 + yaw_rate * k,
                    label,
                    track_id,
                )
            )
    return frames
