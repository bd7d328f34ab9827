"""boxlab: 3D bounding box annotation tooling for LiDAR sequences.

Core pieces:

* :mod:`boxlab.types` - boxes, cameras, planes and class labels.
* :mod:`boxlab.geometry` - IoU, keyframe interpolation, camera projection
  and ground-plane detection.
* :mod:`boxlab.io` - sequence manifests, point clouds and annotation files.
* :mod:`boxlab.store` - the editing session: tracks, keyframes, undo/redo.
* :mod:`boxlab.evaluation` - detection matching and precision/recall/F1.
* :mod:`boxlab.server` - the HTTP API the web annotator talks to.
* :mod:`boxlab.cli` - the ``boxlab`` command line tool.
"""
from .types import Box3D, CameraModel, ClassLabel, Plane, ProjectedBox, Vec3, wrap_angle

__version__ = "0.1.0"

__all__ = [
    "Box3D",
    "CameraModel",
    "ClassLabel",
    "Plane",
    "ProjectedBox",
    "Vec3",
    "wrap_angle",
    "__version__",
]
