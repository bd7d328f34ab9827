"""Rotated-box 3D intersection over union."""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..types import Box3D


def iou_3d(a: Box3D, b: Box3D) -> float:
    """3D IoU of two yaw-oriented boxes.

    The intersection volume is the convex clip of the two BEV footprints
    times the vertical overlap. Symmetric in its arguments and always in
    [0, 1]; disjoint footprints or height ranges give exactly 0.
    """
    return float(kernels.active.iou3d_pair(a.params7(), b.params7()))


def iou_matrix(boxes_a, boxes_b) -> np.ndarray:
    """Pairwise 3D IoU matrix of shape (len(boxes_a), len(boxes_b))."""
    if len(boxes_a) == 0 or len(boxes_b) == 0:
        return np.zeros((len(boxes_a), len(boxes_b)), dtype=np.float64)
    pa = np.stack([b.params7() for b in boxes_a])
    pb = np.stack([b.params7() for b in boxes_b])
    return kernels.active.iou3d_matrix(pa, pb)
