"""Disk formats: manifests, point clouds and annotation documents."""
from .annotations import (
    FORMAT_VERSION,
    AnnotationFile,
    annotation_bytes,
    annotation_document,
    annotation_file_from_document,
    import_ground_truth,
    load_annotations,
    save_annotations,
)
from .manifest import FrameRecord, SequenceManifest, load_manifest
from .pointcloud import ASCII_HEADER, RECORD_BYTES, load_point_cloud, save_point_cloud

__all__ = [
    "ASCII_HEADER",
    "FORMAT_VERSION",
    "RECORD_BYTES",
    "AnnotationFile",
    "FrameRecord",
    "SequenceManifest",
    "annotation_bytes",
    "annotation_document",
    "annotation_file_from_document",
    "import_ground_truth",
    "load_annotations",
    "load_manifest",
    "load_point_cloud",
    "save_annotations",
    "save_point_cloud",
]
