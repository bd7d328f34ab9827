"""Numeric hot kernels with a numba-jitted and a pure-numpy backend.

The same function bodies are compiled with ``numba.njit`` when numba is
available and run as plain numpy/python otherwise. Backend selection:

* ``BOXLAB_NUMBA=0`` (also ``false``/``off``/``no``) forces the numpy path.
* Anything else uses numba when it can be imported, numpy otherwise.

Both backends stay importable side by side (``numpy_backend`` /
``numba_backend``) so tests can assert their equivalence and
``benchmarks/bench_kernels.py`` can time them against each other.
"""
from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

# Degenerate BEV intersections (shared edges, touching corners) collapse to
# zero area below this shoelace epsilon, in m^2.
AREA_EPSILON = 1e-9


def _build_backend(name, decorate):
    @decorate
    def bev_quad(p, xs, ys):
        # Footprint of [cx,cy,cz,dx,dy,dz,yaw] as a CCW quad in the z=0 plane.
        # Corner order matches boxlab.geometry.box: (+x,+y), (-x,+y), (-x,-y), (+x,-y).
        c = math.cos(p[6])
        s = math.sin(p[6])
        hx = 0.5 * p[3]
        hy = 0.5 * p[4]
        xs[0] = p[0] + c * hx - s * hy
        ys[0] = p[1] + s * hx + c * hy
        xs[1] = p[0] - c * hx - s * hy
        ys[1] = p[1] - s * hx + c * hy
        xs[2] = p[0] - c * hx + s * hy
        ys[2] = p[1] - s * hx - c * hy
        xs[3] = p[0] + c * hx + s * hy
        ys[3] = p[1] + s * hx - c * hy

    @decorate
    def quad_clip_area(ax, ay, bx, by):
        # Sutherland-Hodgman clip of CCW quad A against CCW quad B, then the
        # shoelace area of the result. Convex output has at most 8 vertices;
        # buffers are sized well past the worst case.
        cur_x = np.empty(16, np.float64)
        cur_y = np.empty(16, np.float64)
        nxt_x = np.empty(16, np.float64)
        nxt_y = np.empty(16, np.float64)
        n_cur = 4
        for i in range(4):
            cur_x[i] = ax[i]
            cur_y[i] = ay[i]
        for e in range(4):
            e2 = e + 1 if e < 3 else 0
            x1 = bx[e]
            y1 = by[e]
            ex = bx[e2] - x1
            ey = by[e2] - y1
            n_nxt = 0
            for i in range(n_cur):
                j = i + 1 if i + 1 < n_cur else 0
                px = cur_x[i]
                py = cur_y[i]
                qx = cur_x[j]
                qy = cur_y[j]
                dp = ex * (py - y1) - ey * (px - x1)
                dq = ex * (qy - y1) - ey * (qx - x1)
                if dq >= 0.0:
                    if dp < 0.0:
                        t = dp / (dp - dq)
                        nxt_x[n_nxt] = px + t * (qx - px)
                        nxt_y[n_nxt] = py + t * (qy - py)
                        n_nxt += 1
                    nxt_x[n_nxt] = qx
                    nxt_y[n_nxt] = qy
                    n_nxt += 1
                elif dp >= 0.0:
                    t = dp / (dp - dq)
                    nxt_x[n_nxt] = px + t * (qx - px)
                    nxt_y[n_nxt] = py + t * (qy - py)
                    n_nxt += 1
            if n_nxt == 0:
                return 0.0
            n_cur = n_nxt
            tmp_x = cur_x
            cur_x = nxt_x
            nxt_x = tmp_x
            tmp_y = cur_y
            cur_y = nxt_y
            nxt_y = tmp_y
        area2 = 0.0
        for i in range(n_cur):
            j = i + 1 if i + 1 < n_cur else 0
            area2 += cur_x[i] * cur_y[j] - cur_x[j] * cur_y[i]
        area = 0.5 * area2
        if area <= AREA_EPSILON:
            return 0.0
        return area

    @decorate
    def iou3d_pair(a, b):
        # Canonical argument order makes iou(a, b) bitwise symmetric.
        swap = False
        for k in range(7):
            if a[k] < b[k]:
                break
            if a[k] > b[k]:
                swap = True
                break
        if swap:
            tmp = a
            a = b
            b = tmp
        z_lo = max(a[2] - 0.5 * a[5], b[2] - 0.5 * b[5])
        z_hi = min(a[2] + 0.5 * a[5], b[2] + 0.5 * b[5])
        h = z_hi - z_lo
        if h <= 0.0:
            return 0.0
        ax = np.empty(4, np.float64)
        ay = np.empty(4, np.float64)
        bx = np.empty(4, np.float64)
        by = np.empty(4, np.float64)
        bev_quad(a, ax, ay)
        bev_quad(b, bx, by)
        area = quad_clip_area(ax, ay, bx, by)
        if area <= 0.0:
            return 0.0
        inter = area * h
        va = a[3] * a[4] * a[5]
        vb = b[3] * b[4] * b[5]
        iou = inter / (va + vb - inter)
        if iou < 0.0:
            return 0.0
        if iou > 1.0:
            return 1.0
        return iou

    @decorate
    def iou3d_matrix(boxes_a, boxes_b):
        n = boxes_a.shape[0]
        m = boxes_b.shape[0]
        out = np.empty((n, m), np.float64)
        for i in range(n):
            for j in range(m):
                out[i, j] = iou3d_pair(boxes_a[i], boxes_b[j])
        return out

    @decorate
    def plane_inlier_counts(points, planes, tol):
        # points: (N, 3), planes: (K, 4) rows [nx, ny, nz, offset].
        k = planes.shape[0]
        counts = np.zeros(k, np.int64)
        for i in range(k):
            d = np.abs(
                points[:, 0] * planes[i, 0]
                + points[:, 1] * planes[i, 1]
                + points[:, 2] * planes[i, 2]
                + planes[i, 3]
            )
            counts[i] = (d <= tol).sum()
        return counts

    return SimpleNamespace(
        name=name,
        bev_quad=bev_quad,
        quad_clip_area=quad_clip_area,
        iou3d_pair=iou3d_pair,
        iou3d_matrix=iou3d_matrix,
        plane_inlier_counts=plane_inlier_counts,
    )


numpy_backend = _build_backend("numpy", lambda f: f)

numba_backend = None
try:
    from numba import njit as _njit
except ImportError:
    _njit = None
if _njit is not None:
    numba_backend = _build_backend("numba", _njit(fastmath=False))


def _numba_disabled_by_env() -> bool:
    return os.environ.get("BOXLAB_NUMBA", "").strip().lower() in {"0", "false", "off", "no"}


if numba_backend is not None and not _numba_disabled_by_env():
    active = numba_backend
else:
    active = numpy_backend


def backend_name() -> str:
    """Name of the backend in use: 'numba' or 'numpy'."""
    return active.name


def available_backends() -> dict:
    out = {"numpy": numpy_backend}
    if numba_backend is not None:
        out["numba"] = numba_backend
    return out
