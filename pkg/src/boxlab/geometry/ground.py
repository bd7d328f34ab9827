"""Ground plane detection and removal for LiDAR point clouds."""
from __future__ import annotations

import math

import numpy as np

from .. import kernels
from ..errors import InsufficientPointsError, NoPlaneFoundError
from ..types import Plane, Vec3

DEFAULT_ITERATIONS = 200
DEFAULT_INLIER_TOL = 0.15
DEFAULT_MIN_INLIER_FRAC = 0.3


class _Lcg:
    """64-bit linear congruential generator.

    Candidate sampling must not depend on the compute backend, so the
    random triples are drawn here in plain Python rather than inside a
    kernel. Same seed, same triples, on every platform.
    """

    _MULT = 6364136223846793005
    _INC = 1442695040888963407
    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = (seed ^ 0x9E3779B97F4A7C15) & self._MASK
        self._next()

    def _next(self) -> int:
        self._state = (self._state * self._MULT + self._INC) & self._MASK
        return self._state

    def below(self, n: int) -> int:
        # Top bits of an LCG are the well-mixed ones.
        return (self._next() >> 33) % n


def _candidate_planes(xyz: np.ndarray, seed: int, n_iterations: int) -> np.ndarray:
    """Sample point triples and fit a plane through each.

    Returns an (m, 4) array of [nx, ny, nz, d] rows with unit normals.
    Degenerate (near-collinear) triples are skipped.
    """
    rng = _Lcg(seed)
    n = xyz.shape[0]
    planes = []
    for _ in range(n_iterations):
        i = rng.below(n)
        j = rng.below(n)
        k = rng.below(n)
        if i == j or j == k or i == k:
            continue
        p0, p1, p2 = xyz[i], xyz[j], xyz[k]
        normal = np.cross(p1 - p0, p2 - p0)
        norm = float(np.linalg.norm(normal))
        if norm < 1e-12:
            continue
        normal = normal / norm
        d = -float(normal @ p0)
        planes.append((normal[0], normal[1], normal[2], d))
    if not planes:
        return np.zeros((0, 4), dtype=np.float64)
    return np.asarray(planes, dtype=np.float64)


def _orient_up(normal: np.ndarray) -> np.ndarray:
    """Flip the normal so it points toward +z, with deterministic ties."""
    if normal[2] > 0.0:
        return normal
    if normal[2] < 0.0:
        return -normal
    if normal[0] > 0.0 or (normal[0] == 0.0 and normal[1] > 0.0):
        return normal
    return -normal


def detect_ground_plane(
    points: np.ndarray,
    seed: int = 42,
    *,
    n_iterations: int = DEFAULT_ITERATIONS,
    inlier_tol: float = DEFAULT_INLIER_TOL,
    min_inlier_frac: float = DEFAULT_MIN_INLIER_FRAC,
) -> tuple[Plane, np.ndarray]:
    """RANSAC plane fit with a least-squares refinement step.

    points: (N, 3) or (N, 4) array; only x, y, z are used.
    Returns (plane, inlier_indices). The plane normal is a unit vector
    oriented so that its z component is non-negative, and the inlier
    indices are sorted ascending.

    Deterministic for a given (points, seed) pair: candidate triples come
    from a fixed LCG stream and the best candidate is the first one with
    the maximum inlier count.

    Raises InsufficientPointsError for fewer than 3 points and
    NoPlaneFoundError when no candidate reaches the inlier quorum
    max(3, ceil(min_inlier_frac * N)).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] < 3:
        raise ValueError(f"expected (N, 3) or (N, 4) points, got {pts.shape}")
    xyz = np.ascontiguousarray(pts[:, :3])
    n = xyz.shape[0]
    if n < 3:
        raise InsufficientPointsError(f"plane fit needs at least 3 points, got {n}")

    planes = _candidate_planes(xyz, seed, n_iterations)
    if planes.shape[0] == 0:
        raise NoPlaneFoundError("all sampled point triples were degenerate")

    counts = kernels.active.plane_inlier_counts(xyz, planes, inlier_tol)
    best = int(np.argmax(counts))  # first max wins on ties
    min_inliers = max(3, math.ceil(min_inlier_frac * n))
    if int(counts[best]) < min_inliers:
        raise NoPlaneFoundError(
            f"best candidate has {int(counts[best])} inliers, "
            f"need at least {min_inliers} of {n}"
        )

    # Refine: total least squares over the candidate's inliers.
    nx, ny, nz, d = planes[best]
    dist = np.abs(xyz @ np.array([nx, ny, nz]) + d)
    inliers = xyz[dist <= inlier_tol]
    centroid = inliers.mean(axis=0)
    centered = inliers - centroid
    cov = centered.T @ centered
    eigvals, eigvecs = np.linalg.eigh(cov)
    normal = eigvecs[:, 0]  # eigenvector of the smallest eigenvalue
    normal = normal / np.linalg.norm(normal)
    normal = _orient_up(normal)
    offset = -float(normal @ centroid)

    plane = Plane(normal=Vec3(float(normal[0]), float(normal[1]), float(normal[2])),
                  offset=offset)
    final_dist = np.abs(plane.signed_distance(xyz))
    inlier_indices = np.flatnonzero(final_dist <= inlier_tol)
    return plane, inlier_indices


def remove_ground(points: np.ndarray, plane: Plane, margin: float = 0.2) -> np.ndarray:
    """Keep points strictly more than `margin` above the plane.

    Preserves the input's column count and dtype. A point at exactly
    `margin` is removed.
    """
    if margin < 0.0:
        raise ValueError(f"margin must be non-negative, got {margin}")
    pts = np.asarray(points)
    if pts.ndim != 2 or pts.shape[1] < 3:
        raise ValueError(f"expected (N, 3) or (N, 4) points, got {pts.shape}")
    height = plane.signed_distance(pts[:, :3].astype(np.float64, copy=False))
    return pts[height > margin]
