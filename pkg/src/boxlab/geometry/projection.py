"""3D-to-2D label transfer: pinhole projection of points and boxes."""
from __future__ import annotations

from ..types import Box3D, CameraModel, ProjectedBox
from .box import box_corners

# Points closer than this along the optical axis count as behind the camera.
Z_NEAR = 0.1


def _to_camera(cam: CameraModel, x: float, y: float, z: float):
    # Scalar arithmetic, evaluated left to right; keeps results reproducible
    # bit for bit against independent reimplementations of the formula.
    r = cam.rotation
    t = cam.translation
    xc = r[0, 0] * x + r[0, 1] * y + r[0, 2] * z + t[0]
    yc = r[1, 0] * x + r[1, 1] * y + r[1, 2] * z + t[1]
    zc = r[2, 0] * x + r[2, 1] * y + r[2, 2] * z + t[2]
    return xc, yc, zc


def _pixel(cam: CameraModel, xc: float, yc: float, zc: float):
    # u = (fx*x + skew*y) / z + cx,  v = fy*y / z + cy
    u = (cam.fx * xc + cam.skew * yc) / zc + cam.cx
    v = cam.fy * yc / zc + cam.cy
    return u, v


def project_point(cam: CameraModel, p) -> tuple[float, float] | None:
    """Project a LiDAR-frame point into pixel coordinates.

    Returns None when the point lies at camera depth <= 0.1 m (behind or
    grazing the camera); otherwise the pixel position, which may fall
    outside the image bounds.
    """
    x, y, z = p
    xc, yc, zc = _to_camera(cam, float(x), float(y), float(z))
    if zc <= Z_NEAR:
        return None
    return _pixel(cam, xc, yc, zc)


def project_box(cam: CameraModel, box: Box3D) -> ProjectedBox | None:
    """Project a box into one camera; None when it is not visible.

    Corners behind the near plane are dropped; the remaining corners form an
    axis-aligned hull that is clipped to the image. A box with no corner in
    front of the camera, or whose clipped hull has zero area, is not visible.
    """
    corners = box_corners(box)
    pts: list[tuple[float, float]] = []
    for i in range(8):
        xc, yc, zc = _to_camera(cam, corners[i, 0], corners[i, 1], corners[i, 2])
        if zc > Z_NEAR:
            pts.append(_pixel(cam, xc, yc, zc))
    if not pts:
        return None
    xmin = min(p[0] for p in pts)
    xmax = max(p[0] for p in pts)
    ymin = min(p[1] for p in pts)
    ymax = max(p[1] for p in pts)
    w = float(cam.width)
    h = float(cam.height)
    cxmin = min(max(xmin, 0.0), w)
    cxmax = min(max(xmax, 0.0), w)
    cymin = min(max(ymin, 0.0), h)
    cymax = min(max(ymax, 0.0), h)
    if cxmax - cxmin <= 0.0 or cymax - cymin <= 0.0:
        return None
    return ProjectedBox(
        camera=cam.name,
        corners_px=tuple(pts),
        rect=(cxmin, cymin, cxmax, cymax),
        visible_corner_count=len(pts),
    )


def project_box_all(cameras, box: Box3D) -> list[ProjectedBox]:
    """Project a box into every camera it is visible in."""
    out = []
    for cam in cameras:
        pb = project_box(cam, box)
        if pb is not None:
            out.append(pb)
    return out
