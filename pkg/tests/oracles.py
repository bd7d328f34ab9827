"""Independent reference implementations used to check the library.

Everything here is written from the documented contracts, by a different
computational route than the package (matrix algebra instead of scalar
loops, Monte-Carlo sampling instead of polygon clipping, exhaustive
search instead of greedy matching), so agreement is evidence rather than
tautology.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

Z_NEAR = 0.1


# -- Monte-Carlo 3D IoU ----------------------------------------------------


def _box_corners_bev(p: np.ndarray) -> np.ndarray:
    """BEV footprint corners of [cx,cy,cz,dx,dy,dz,yaw] via a rotation matrix."""
    c, s = math.cos(p[6]), math.sin(p[6])
    rot = np.array([[c, -s], [s, c]])
    half = 0.5 * p[3:5]
    local = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]]) * half
    return local @ rot.T + p[0:2]


def _aabb(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    bev = _box_corners_bev(p)
    lo = np.array([bev[:, 0].min(), bev[:, 1].min(), p[2] - 0.5 * p[5]])
    hi = np.array([bev[:, 0].max(), bev[:, 1].max(), p[2] + 0.5 * p[5]])
    return lo, hi


def _inside(points: np.ndarray, p: np.ndarray) -> np.ndarray:
    d = points[:, :2] - p[0:2]
    c, s = math.cos(p[6]), math.sin(p[6])
    lx = c * d[:, 0] + s * d[:, 1]
    ly = -s * d[:, 0] + c * d[:, 1]
    lz = points[:, 2] - p[2]
    return (
        (np.abs(lx) <= 0.5 * p[3])
        & (np.abs(ly) <= 0.5 * p[4])
        & (np.abs(lz) <= 0.5 * p[5])
    )


def mc_iou(pa: np.ndarray, pb: np.ndarray, n_samples: int = 1_000_000, seed: int = 0) -> float:
    """3D IoU by uniform point sampling over the pair's joint bounding box."""
    lo_a, hi_a = _aabb(pa)
    lo_b, hi_b = _aabb(pb)
    lo = np.minimum(lo_a, lo_b)
    hi = np.maximum(hi_a, hi_b)
    rng = np.random.default_rng(seed)
    points = rng.uniform(lo, hi, (n_samples, 3))
    in_a = _inside(points, pa)
    in_b = _inside(points, pb)
    union = int((in_a | in_b).sum())
    if union == 0:
        return 0.0
    return int((in_a & in_b).sum()) / union


# -- corners and projection -------------------------------------------------


def corners_oracle(center, dims, yaw: float) -> np.ndarray:
    """The 8 box vertices via an explicit rotation matrix product.

    Order: bottom face counter-clockwise seen from +z starting at local
    (+x, +y), then the top face in the same order.
    """
    c, s = math.cos(yaw), math.sin(yaw)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    hx, hy, hz = 0.5 * dims[0], 0.5 * dims[1], 0.5 * dims[2]
    signs = [(1, 1), (-1, 1), (-1, -1), (1, -1)]
    local = np.array(
        [[sx * hx, sy * hy, -hz] for sx, sy in signs]
        + [[sx * hx, sy * hy, hz] for sx, sy in signs]
    )
    return local @ rot.T + np.asarray(center, dtype=np.float64)


def project_point_oracle(rotation, translation, intrinsics, point):
    """Pinhole projection written out scalar by scalar.

    Returns None at camera depth <= 0.1 m, else (u, v). Arithmetic follows
    the documented order: row dot product left to right, then
    (fx*x + skew*y)/z + cx and fy*y/z + cy.
    """
    r = np.asarray(rotation, dtype=np.float64).reshape(3, 3)
    t = np.asarray(translation, dtype=np.float64).reshape(3)
    k = np.asarray(intrinsics, dtype=np.float64).reshape(3, 3)
    x, y, z = float(point[0]), float(point[1]), float(point[2])
    xc = r[0, 0] * x + r[0, 1] * y + r[0, 2] * z + t[0]
    yc = r[1, 0] * x + r[1, 1] * y + r[1, 2] * z + t[1]
    zc = r[2, 0] * x + r[2, 1] * y + r[2, 2] * z + t[2]
    if zc <= Z_NEAR:
        return None
    u = (k[0, 0] * xc + k[0, 1] * yc) / zc + k[0, 2]
    v = k[1, 1] * yc / zc + k[1, 2]
    return (u, v)


def project_box_oracle(rotation, translation, intrinsics, width, height, corners):
    """Hull-and-clip of the in-front projected corners; None if invisible."""
    pts = []
    for corner in corners:
        uv = project_point_oracle(rotation, translation, intrinsics, corner)
        if uv is not None:
            pts.append(uv)
    if not pts:
        return None
    xmin = min(p[0] for p in pts)
    xmax = max(p[0] for p in pts)
    ymin = min(p[1] for p in pts)
    ymax = max(p[1] for p in pts)
    w, h = float(width), float(height)
    cxmin = min(max(xmin, 0.0), w)
    cxmax = min(max(xmax, 0.0), w)
    cymin = min(max(ymin, 0.0), h)
    cymax = min(max(ymax, 0.0), h)
    if cxmax - cxmin <= 0.0 or cymax - cymin <= 0.0:
        return None
    return (cxmin, cymin, cxmax, cymax), len(pts)


# -- matching ----------------------------------------------------------------


def brute_force_match(iou: np.ndarray, threshold: float):
    """Best one-to-one assignment by exhaustive search.

    Considers every injective gt→pred assignment whose pairs all reach the
    threshold (and overlap at all); picks the one maximizing (pair count,
    total IoU). Returns (pair count, total IoU, set of (i, j) index pairs).
    Only feasible for small instances.
    """
    n, m = iou.shape
    best = (0, 0.0, frozenset())
    gt_indices = range(n)
    for r in range(min(n, m), -1, -1):
        for gts in itertools.combinations(gt_indices, r):
            for preds in itertools.permutations(range(m), r):
                total = 0.0
                ok = True
                for i, j in zip(gts, preds):
                    v = float(iou[i, j])
                    if v < threshold or v <= 0.0:
                        ok = False
                        break
                    total += v
                if ok and (r, total) > (best[0], best[1] + 1e-15):
                    best = (r, total, frozenset(zip(gts, preds)))
        if best[0] == r and r > 0:
            # No larger cardinality can appear below in the loop.
            break
    return best


# -- ground plane -------------------------------------------------------------


def plane_distance_filter(points: np.ndarray, normal, offset: float, margin: float) -> np.ndarray:
    """Brute-force per-point signed distance filter (> margin survives)."""
    keep = []
    nx, ny, nz = normal
    for row in points:
        d = row[0] * nx + row[1] * ny + row[2] * nz + offset
        if d > margin:
            keep.append(row)
    if not keep:
        return np.empty((0, points.shape[1]), dtype=points.dtype)
    return np.array(keep, dtype=points.dtype)
