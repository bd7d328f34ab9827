"""The ``boxlab`` command line tool.

Exit codes: 0 success, 1 domain errors (bad data, failed preconditions),
2 usage errors. All subcommands are deterministic for fixed inputs and
seeds; metric values print with 6 significant digits while files keep
full precision.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import BoxLabError
from .evaluation import evaluate_sequence, export_metric_series
from .geometry.ground import detect_ground_plane, remove_ground
from .geometry.projection import project_box
from .io.annotations import import_ground_truth, load_annotations, save_annotations
from .io.manifest import load_manifest
from .io.pointcloud import ASCII_HEADER, load_point_cloud, save_point_cloud
from .store import AnnotationStore


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _load_labels(path: str, sequence_id: str = ""):
    schema = "external-boxes" if Path(path).suffix == ".csv" else "native"
    return import_ground_truth(path, schema=schema, sequence_id=sequence_id)


def _cmd_serve(args) -> int:
    from .server import serve

    serve(
        args.data_root,
        port=args.port,
        autosave_secs=args.autosave_secs,
        static_dir=args.static_dir,
    )
    return 0


def _cmd_evaluate(args) -> int:
    pred = load_annotations(args.pred)
    gt = _load_labels(args.gt, sequence_id=pred.sequence_id)
    report = evaluate_sequence(pred, gt, args.iou_threshold)
    agg = report.aggregate
    print(f"mean_iou {_fmt(agg.mean_iou)}")
    print(f"frac_iou_above_0_6 {_fmt(agg.frac_iou_above_0_6)}")
    print(f"precision {_fmt(agg.precision)}")
    print(f"recall {_fmt(agg.recall)}")
    print(f"f1 {_fmt(agg.f1)}")
    counts = " ".join(f"{k}={v}" for k, v in sorted(agg.per_class_counts.items()))
    print(f"per_class_counts {counts}")
    if args.out:
        export_metric_series(report, args.out)
    return 0


def _cmd_interpolate(args) -> int:
    file = load_annotations(args.annotations)
    frame_count = max(file.frame_annotations, default=0) + 1
    store = AnnotationStore.from_file(file, frame_count)
    written = store.interpolate_range(args.track, args.start, args.end)
    save_annotations(store.to_annotation_file(), args.out)
    print(f"written {written}")
    return 0


def _cmd_project(args) -> int:
    manifest = load_manifest(args.manifest)
    file = load_annotations(args.annotations)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    total = 0
    for camera in manifest.cameras:
        labels = []
        for frame, box in file.all_boxes():
            pb = project_box(camera, box)
            if pb is None:
                continue
            labels.append(
                {
                    "frame": frame,
                    "track_id": box.track_id,
                    "class": box.class_label.value,
                    "rect": pb.rect_dict(),
                    "visible_corner_count": pb.visible_corner_count,
                }
            )
        out_path = out_dir / f"{camera.name}.json"
        doc = {"camera": camera.name, "labels": labels}
        out_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        total += len(labels)
    print(f"cameras {len(manifest.cameras)}")
    print(f"labels {total}")
    return 0


def _cmd_ground_filter(args) -> int:
    points = load_point_cloud(args.pointcloud)
    plane, inliers = detect_ground_plane(points, seed=args.seed)
    kept = remove_ground(points, plane, args.margin)
    raw = Path(args.pointcloud).read_bytes()
    fmt = "ascii" if raw.lstrip()[: len(ASCII_HEADER)] == ASCII_HEADER.encode("ascii") else "binary"
    save_point_cloud(kept, args.out, fmt=fmt)
    n = plane.normal
    print(f"normal {_fmt(n.x)} {_fmt(n.y)} {_fmt(n.z)}")
    print(f"offset {_fmt(plane.offset)}")
    print(f"inliers {len(inliers)}")
    print(f"kept {kept.shape[0]} of {points.shape[0]}")
    return 0


def _cmd_convert(args) -> int:
    file = import_ground_truth(args.in_path, schema=args.schema)
    save_annotations(file, args.out)
    print(f"boxes {file.box_count()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxlab",
        description="3D bounding box annotation tooling: serve, evaluate, interpolate, project, filter, convert.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("--data-root", required=True, help="directory containing sequence manifests")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--autosave-secs", type=float, default=5.0)
    p.add_argument("--static-dir", default=None, help="static UI assets to serve at /")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("evaluate", help="compare annotations against ground truth")
    p.add_argument("--pred", required=True, help="annotation file to score")
    p.add_argument("--gt", required=True, help="ground truth (native file or .csv box table)")
    p.add_argument("--iou-threshold", type=float, default=0.6)
    p.add_argument("--out", default=None, help="write per-frame metric series here")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("interpolate", help="fill frames between two keyframes of a track")
    p.add_argument("--annotations", required=True)
    p.add_argument("--track", type=int, required=True)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--end", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_interpolate)

    p = sub.add_parser("project", help="write per-camera 2D labels for every annotation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("ground-filter", help="remove ground points from a point cloud")
    p.add_argument("--pointcloud", required=True)
    p.add_argument("--margin", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ground_filter)

    p = sub.add_parser("convert", help="convert ground-truth labels to the annotation format")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--schema", choices=["native", "external-boxes"], required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BoxLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
