"""Geometry: box vertices, interpolation, IoU, projection, ground plane."""
from .box import MIN_DIM, bev_polygon, box_corners, interpolate_box, interpolate_track
from .ground import detect_ground_plane, remove_ground
from .iou import iou_3d, iou_matrix
from .projection import Z_NEAR, project_box, project_box_all, project_point

__all__ = [
    "MIN_DIM",
    "Z_NEAR",
    "bev_polygon",
    "box_corners",
    "detect_ground_plane",
    "interpolate_box",
    "interpolate_track",
    "iou_3d",
    "iou_matrix",
    "project_box",
    "project_box_all",
    "project_point",
    "remove_ground",
]
