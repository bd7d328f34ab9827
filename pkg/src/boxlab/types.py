"""Domain types: vectors, oriented boxes, camera models and planes.

Conventions used throughout the package:

* World/LiDAR frame is right-handed with +z up; distances in meters.
* A box's ``yaw`` is its heading about world +z, normalized to (-pi, pi].
* ``dims`` are full extents: ``dims.x`` along the box x axis (length),
  ``dims.y`` along box y (width), ``dims.z`` along box z (height).
* Camera frames follow the usual computer-vision convention: x right,
  y down, z forward (optical axis).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidBoxError

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap an angle in radians to the interval (-pi, pi]."""
    r = math.fmod(a + math.pi, TWO_PI)
    if r <= 0.0:
        r += TWO_PI
    return r - math.pi


class ClassLabel(str, Enum):
    CAR = "CAR"
    PEDESTRIAN = "PEDESTRIAN"
    MOTORCYCLE = "MOTORCYCLE"
    BICYCLE = "BICYCLE"
    TRUCK = "TRUCK"


@dataclass(frozen=True, slots=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        # Coerce so serialized components never depend on int vs float input.
        for name in ("x", "y", "z"):
            value = getattr(self, name)
            if not isinstance(value, float):
                object.__setattr__(self, name, float(value))
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise InvalidBoxError(f"non-finite vector components: ({self.x}, {self.y}, {self.z})")

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "Vec3":
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z


@dataclass(frozen=True, slots=True)
class Box3D:
    """Oriented 3D bounding box with class label and track identity.

    ``yaw`` is normalized to (-pi, pi] on construction.
    """

    center: Vec3
    dims: Vec3
    yaw: float
    class_label: ClassLabel
    track_id: int = 0

    def __post_init__(self):
        if not (self.dims.x > 0 and self.dims.y > 0 and self.dims.z > 0):
            raise InvalidBoxError(f"box dims must be positive, got {tuple(self.dims)}")
        if not math.isfinite(self.yaw):
            raise InvalidBoxError("yaw must be finite")
        if not isinstance(self.class_label, ClassLabel):
            raise InvalidBoxError(f"unknown class label: {self.class_label!r}")
        if self.track_id < 0:
            raise InvalidBoxError(f"track_id must be non-negative, got {self.track_id}")
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))

    def params7(self) -> np.ndarray:
        """Pack geometry as [cx, cy, cz, dx, dy, dz, yaw] for the kernels."""
        c, d = self.center, self.dims
        return np.array([c.x, c.y, c.z, d.x, d.y, d.z, self.yaw], dtype=np.float64)

    @property
    def volume(self) -> float:
        return self.dims.x * self.dims.y * self.dims.z


@dataclass(frozen=True, slots=True)
class Plane:
    """Plane {p : normal . p + offset = 0} with a unit normal."""

    normal: Vec3
    offset: float

    def __post_init__(self):
        n = self.normal
        norm = math.sqrt(n.x * n.x + n.y * n.y + n.z * n.z)
        if abs(norm - 1.0) > 1e-9:
            raise InvalidBoxError(f"plane normal must be unit length, |n| = {norm}")

    def signed_distance(self, points) -> np.ndarray:
        """Signed distances of (N, 3+) points; positive on the +normal side."""
        pts = np.asarray(points, dtype=np.float64)
        n = self.normal
        return pts[:, 0] * n.x + pts[:, 1] * n.y + pts[:, 2] * n.z + self.offset


class CameraModel:
    """Pinhole camera: intrinsics plus a LiDAR-to-camera rigid transform.

    ``rotation`` and ``translation`` map LiDAR-frame points into the camera
    frame as ``p_cam = R @ p + t``.
    """

    __slots__ = ("name", "intrinsics", "rotation", "translation", "width", "height")

    def __init__(self, name: str, intrinsics, rotation, translation, width: int, height: int):
        k = np.array(intrinsics, dtype=np.float64).reshape(3, 3)
        r = np.array(rotation, dtype=np.float64).reshape(3, 3)
        t = np.array(translation, dtype=np.float64).reshape(3)
        if width <= 0 or height <= 0:
            raise InvalidBoxError(f"camera {name!r}: image size must be positive")
        err = np.abs(r.T @ r - np.eye(3)).max()
        if err > 1e-6:
            raise InvalidBoxError(f"camera {name!r}: rotation not orthonormal (|R^T R - I| = {err:.2e})")
        det = float(np.linalg.det(r))
        if abs(det - 1.0) > 1e-6:
            raise InvalidBoxError(f"camera {name!r}: rotation determinant {det:.8f} != +1")
        fx, fy = k[0, 0], k[1, 1]
        cx, cy = k[0, 2], k[1, 2]
        if fx <= 0 or fy <= 0:
            raise InvalidBoxError(f"camera {name!r}: focal lengths must be positive")
        if not (0 <= cx <= width) or not (0 <= cy <= height):
            raise InvalidBoxError(f"camera {name!r}: principal point ({cx}, {cy}) outside image")
        k.setflags(write=False)
        r.setflags(write=False)
        t.setflags(write=False)
        self.name = name
        self.intrinsics = k
        self.rotation = r
        self.translation = t
        self.width = int(width)
        self.height = int(height)

    @property
    def fx(self) -> float:
        return float(self.intrinsics[0, 0])

    @property
    def fy(self) -> float:
        return float(self.intrinsics[1, 1])

    @property
    def cx(self) -> float:
        return float(self.intrinsics[0, 2])

    @property
    def cy(self) -> float:
        return float(self.intrinsics[1, 2])

    @property
    def skew(self) -> float:
        return float(self.intrinsics[0, 1])

    def __eq__(self, other):
        if not isinstance(other, CameraModel):
            return NotImplemented
        return (
            self.name == other.name
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.intrinsics, other.intrinsics)
            and np.array_equal(self.rotation, other.rotation)
            and np.array_equal(self.translation, other.translation)
        )

    def __repr__(self):
        return f"CameraModel(name={self.name!r}, {self.width}x{self.height})"


@dataclass(frozen=True)
class ProjectedBox:
    """A 3D box projected into one camera image.

    ``corners_px`` holds the pixel positions of the corners in front of the
    camera (they may fall outside the image); ``rect`` is their axis-aligned
    hull clipped to the image bounds.
    """

    camera: str
    corners_px: tuple[tuple[float, float], ...]
    rect: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax
    visible_corner_count: int = field(default=0)

    def rect_dict(self) -> dict:
        xmin, ymin, xmax, ymax = self.rect
        return {"xmin": xmin, "ymin": ymin, "xmax": xmax, "ymax": ymax}
