"""Box vertex math and keyframe interpolation."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from ..errors import InvalidPairError, OrderingError
from ..types import Box3D, wrap_angle

# Minimum extent kept when interpolation or editing would collapse a box.
MIN_DIM = 0.01

# Corner sign pattern: bottom face counter-clockwise viewed from +z,
# starting at (+x, +y); the top face repeats the same xy order.
_CORNER_SIGNS = ((1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))


def box_corners(box: Box3D) -> np.ndarray:
    """The 8 vertices of a box as an (8, 3) array.

    Rows 0-3 are the bottom face (z = center.z - dims.z/2) counter-clockwise
    viewed from +z starting at local (+x, +y); rows 4-7 are the top face in
    the same xy order. Downstream code (projection, BEV footprints) relies
    on this ordering.
    """
    c = math.cos(box.yaw)
    s = math.sin(box.yaw)
    hx, hy, hz = box.dims.x * 0.5, box.dims.y * 0.5, box.dims.z * 0.5
    out = np.empty((8, 3), dtype=np.float64)
    for i, (sx, sy) in enumerate(_CORNER_SIGNS):
        lx, ly = sx * hx, sy * hy
        x = box.center.x + c * lx - s * ly
        y = box.center.y + s * lx + c * ly
        out[i] = (x, y, box.center.z - hz)
        out[i + 4] = (x, y, box.center.z + hz)
    return out


def bev_polygon(box: Box3D) -> np.ndarray:
    """Bird's-eye-view footprint: a (4, 2) counter-clockwise quad in z = 0."""
    return box_corners(box)[:4, :2].copy()


def interpolate_box(start: Box3D, end: Box3D, t: float) -> Box3D:
    """Blend two keyframe boxes of one track at parameter t in [0, 1].

    Center and dims are componentwise affine in t; yaw follows the shortest
    angular arc between the endpoint headings. t=0 and t=1 return the
    endpoints exactly.
    """
    if start.track_id != end.track_id:
        raise InvalidPairError(
            f"cannot interpolate across tracks {start.track_id} and {end.track_id}"
        )
    if start.class_label != end.class_label:
        raise InvalidPairError(
            f"cannot interpolate across classes {start.class_label.value} and "
            f"{end.class_label.value}"
        )
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"interpolation parameter must be in [0, 1], got {t}")
    if t == 0.0:
        return start
    if t == 1.0:
        return end
    u = 1.0 - t
    center = type(start.center)(
        u * start.center.x + t * end.center.x,
        u * start.center.y + t * end.center.y,
        u * start.center.z + t * end.center.z,
    )
    dims = type(start.dims)(
        max(MIN_DIM, u * start.dims.x + t * end.dims.x),
        max(MIN_DIM, u * start.dims.y + t * end.dims.y),
        max(MIN_DIM, u * start.dims.z + t * end.dims.z),
    )
    yaw = wrap_angle(start.yaw + t * wrap_angle(end.yaw - start.yaw))
    return replace(start, center=center, dims=dims, yaw=yaw)


def interpolate_track(
    start_kf: tuple[int, Box3D], end_kf: tuple[int, Box3D]
) -> list[tuple[int, Box3D]]:
    """Interpolated boxes for every frame strictly between two keyframes.

    Each interior frame f gets the blend at t = (f - f_start) / (f_end -
    f_start). Adjacent keyframes yield an empty list.
    """
    f0, b0 = start_kf
    f1, b1 = end_kf
    if f0 >= f1:
        raise OrderingError(f"keyframes must satisfy start < end, got {f0} >= {f1}")
    # Validate the pair up front so even an empty interior range rejects
    # mismatched endpoints.
    interpolate_box(b0, b1, 0.0)
    span = f1 - f0
    return [(f, interpolate_box(b0, b1, (f - f0) / span)) for f in range(f0 + 1, f1)]
