"""HTTP service exposing sequences, annotations and evaluation.

One in-memory store per sequence; every mutating route runs under that
store's lock, so concurrent edits serialize into one total order. All
JSON bodies are produced by a single canonical serializer, which makes
responses for unchanged state byte-stable and lets a PUT echo the exact
bytes a following GET returns.
"""
from __future__ import annotations

import json
import mimetypes
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import Response

from .errors import (
    BoxLabError,
    FrameRangeError,
    ManifestError,
    MissingAnnotationError,
    MissingKeyframeError,
    OrderingError,
    PointCloudError,
    SchemaError,
    SequenceMismatchError,
    UnknownTrackError,
)
from .evaluation import DEFAULT_IOU_THRESHOLD, evaluate_sequence
from .geometry.projection import project_box_all
from .io.annotations import (
    FORMAT_VERSION,
    annotation_bytes,
    import_ground_truth,
    load_annotations,
)
from .io.manifest import SequenceManifest, load_manifest
from .store import AnnotationStore
from .types import Box3D, ClassLabel, Vec3

ANNOTATION_FILENAME = "annotations.json"


@dataclass
class SessionContext:
    """One loaded sequence: its manifest, its store, its save location."""

    sequence_id: str
    manifest: SequenceManifest
    store: AnnotationStore
    save_path: Path


def _json_bytes(doc) -> bytes:
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _json_response(doc, status_code: int = 200) -> Response:
    return Response(
        content=_json_bytes(doc),
        status_code=status_code,
        media_type="application/json",
    )


def _fail(status_code: int, reason: str, message: str):
    raise HTTPException(status_code=status_code, detail={"reason": reason, "message": message})


def _manifest_document(m: SequenceManifest) -> dict:
    return {
        "sequence_id": m.sequence_id,
        "frame_count": m.frame_count,
        "frames": [
            {
                "index": f.index,
                "timestamp": f.timestamp,
                "pointcloud": f.pointcloud_path,
                "images": dict(sorted(f.image_paths.items())),
            }
            for f in m.frames
        ],
        "cameras": [
            {
                "name": c.name,
                "intrinsics": [float(v) for v in c.intrinsics.reshape(-1)],
                "rotation": [float(v) for v in c.rotation.reshape(-1)],
                "translation": [float(v) for v in c.translation.reshape(-1)],
                "width": c.width,
                "height": c.height,
            }
            for c in m.cameras
        ],
    }


def _frame_document(ctx: SessionContext, frame: int) -> dict:
    rows = []
    for box in ctx.store.boxes_for_frame(frame):
        rows.append(
            {
                "frame": frame,
                "track_id": box.track_id,
                "class": box.class_label.value,
                "center": [box.center.x, box.center.y, box.center.z],
                "dims": [box.dims.x, box.dims.y, box.dims.z],
                "yaw": box.yaw,
            }
        )
    return {
        "format_version": FORMAT_VERSION,
        "sequence_id": ctx.sequence_id,
        "annotations": rows,
    }


def _parse_put_rows(doc, frame: int, sequence_id: str) -> list[tuple[int | None, Box3D]]:
    """Parse a PUT body in the annotation schema into replace_frame rows.

    track_id -1 requests a brand-new track; every row's frame must equal
    the path frame.
    """
    if not isinstance(doc, dict):
        raise SchemaError("body must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {doc.get('format_version')!r}")
    if doc.get("sequence_id") != sequence_id:
        raise SchemaError(
            f"body sequence_id {doc.get('sequence_id')!r} does not match {sequence_id!r}"
        )
    rows = doc.get("annotations")
    if not isinstance(rows, list):
        raise SchemaError("annotations must be a list")
    out: list[tuple[int | None, Box3D]] = []
    for position, entry in enumerate(rows):
        where = f"annotations[{position}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where}: expected an object")
        if entry.get("frame") != frame:
            raise SchemaError(f"{where}: frame {entry.get('frame')!r} does not match path frame {frame}")
        track_id = entry.get("track_id")
        if not isinstance(track_id, int) or isinstance(track_id, bool) or track_id < -1:
            raise SchemaError(f"{where}: track_id must be an integer >= -1")
        try:
            label = ClassLabel(entry.get("class"))
        except ValueError:
            raise SchemaError(f"{where}: unknown class {entry.get('class')!r}") from None

        def triple(key: str) -> Vec3:
            value = entry.get(key)
            if (
                not isinstance(value, list)
                or len(value) != 3
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
            ):
                raise SchemaError(f"{where}: {key} must be 3 numbers")
            return Vec3(float(value[0]), float(value[1]), float(value[2]))

        yaw = entry.get("yaw")
        if not isinstance(yaw, (int, float)) or isinstance(yaw, bool):
            raise SchemaError(f"{where}: yaw must be a number")
        box = Box3D(
            center=triple("center"),
            dims=triple("dims"),
            yaw=float(yaw),
            class_label=label,
            track_id=max(track_id, 0),
        )
        out.append((None if track_id == -1 else track_id, box))
    return out


def _load_context(manifest_path: Path, autosave_secs: float) -> SessionContext:
    manifest = load_manifest(manifest_path)
    save_path = manifest.root / ANNOTATION_FILENAME
    if save_path.is_file():
        file = load_annotations(save_path)
        if file.sequence_id != manifest.sequence_id:
            raise SequenceMismatchError(
                f"{save_path}: annotations for {file.sequence_id!r} "
                f"found beside manifest {manifest.sequence_id!r}"
            )
        store = AnnotationStore.from_file(
            file, manifest.frame_count, save_path, autosave_secs
        )
    else:
        store = AnnotationStore(
            manifest.sequence_id, manifest.frame_count, save_path, autosave_secs
        )
    return SessionContext(
        sequence_id=manifest.sequence_id,
        manifest=manifest,
        store=store,
        save_path=save_path,
    )


def discover_sequences(data_root) -> list[Path]:
    """Manifest paths under a data root: ./manifest.json and */manifest.json."""
    root = Path(data_root)
    if not root.is_dir():
        raise ManifestError("missing-file", f"data root is not a directory: {root}")
    found = []
    direct = root / "manifest.json"
    if direct.is_file():
        found.append(direct)
    found.extend(sorted(p for p in root.glob("*/manifest.json") if p.is_file()))
    return found


def create_app(
    data_root,
    autosave_secs: float = 5.0,
    static_dir=None,
    autosave_thread: bool = False,
) -> FastAPI:
    """Build the service over every sequence found under `data_root`.

    ``autosave_thread`` starts a background ticker (the `serve` entry point
    enables it; tests drive autosave explicitly instead).
    """
    manifest_paths = discover_sequences(data_root)
    if not manifest_paths:
        raise ManifestError("missing-file", f"no manifest.json found under {data_root}")
    contexts: dict[str, SessionContext] = {}
    for path in manifest_paths:
        ctx = _load_context(path, autosave_secs)
        if ctx.sequence_id in contexts:
            raise ManifestError(
                "invariant", f"duplicate sequence_id {ctx.sequence_id!r} under {data_root}"
            )
        contexts[ctx.sequence_id] = ctx

    data_root = Path(data_root).resolve()
    stop_event = threading.Event()

    def _flush_all():
        for ctx in contexts.values():
            with ctx.store.lock:
                if ctx.store.dirty:
                    ctx.store.save()

    def _ticker():
        while not stop_event.wait(1.0):
            for ctx in contexts.values():
                with ctx.store.lock:
                    ctx.store.autosave_tick()

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        worker = None
        if autosave_thread:
            worker = threading.Thread(target=_ticker, daemon=True)
            worker.start()
        try:
            yield
        finally:
            stop_event.set()
            if worker is not None:
                worker.join(timeout=5.0)
            _flush_all()

    app = FastAPI(title="boxlab", lifespan=lifespan)
    app.state.contexts = contexts

    def ctx_of(sequence_id: str) -> SessionContext:
        ctx = contexts.get(sequence_id)
        if ctx is None:
            _fail(404, "unknown-sequence", f"no sequence {sequence_id!r}")
        return ctx

    def frame_of(ctx: SessionContext, frame: int) -> None:
        if not 0 <= frame < ctx.manifest.frame_count:
            _fail(404, "unknown-frame", f"frame {frame} out of range [0, {ctx.manifest.frame_count})")

    @app.exception_handler(BoxLabError)
    async def _domain_error(_request: Request, exc: BoxLabError):
        if isinstance(exc, (MissingAnnotationError, FrameRangeError, UnknownTrackError)):
            status, reason = 404, "not-found"
        elif isinstance(exc, (OrderingError, MissingKeyframeError)):
            status, reason = 400, "bad-range"
        elif isinstance(exc, (SchemaError, SequenceMismatchError, PointCloudError, ManifestError)):
            status, reason = 400, "bad-input"
        else:
            status, reason = 400, "domain-error"
        message = str(exc)
        if isinstance(exc, MissingAnnotationError) and exc.args:
            message = exc.args[0]  # KeyError repr-quotes str(exc)
        return _json_response(
            {"detail": {"reason": reason, "message": message}}, status_code=status
        )

    @app.get("/api/sequences")
    def list_sequences():
        rows = [
            {
                "sequence_id": ctx.sequence_id,
                "frame_count": ctx.manifest.frame_count,
                "cameras": ctx.manifest.camera_names,
            }
            for ctx in sorted(contexts.values(), key=lambda c: c.sequence_id)
        ]
        return _json_response(rows)

    @app.get("/api/sequences/{sequence_id}/manifest")
    def get_manifest(sequence_id: str):
        return _json_response(_manifest_document(ctx_of(sequence_id).manifest))

    @app.get("/api/sequences/{sequence_id}/frames/{frame}/pointcloud")
    def get_pointcloud(sequence_id: str, frame: int):
        ctx = ctx_of(sequence_id)
        frame_of(ctx, frame)
        path = ctx.manifest.resolve(ctx.manifest.frames[frame].pointcloud_path)
        if not path.is_file():
            _fail(404, "missing-file", f"point cloud missing for frame {frame}")
        return Response(content=path.read_bytes(), media_type="application/octet-stream")

    @app.get("/api/sequences/{sequence_id}/frames/{frame}/images/{camera}")
    def get_image(sequence_id: str, frame: int, camera: str):
        ctx = ctx_of(sequence_id)
        frame_of(ctx, frame)
        record = ctx.manifest.frames[frame]
        if camera not in record.image_paths:
            _fail(404, "unknown-camera", f"no camera {camera!r}")
        path = ctx.manifest.resolve(record.image_paths[camera])
        if not path.is_file():
            _fail(404, "missing-file", f"image missing for frame {frame} camera {camera!r}")
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return Response(content=path.read_bytes(), media_type=media_type)

    @app.get("/api/sequences/{sequence_id}/frames/{frame}/annotations")
    def get_annotations(sequence_id: str, frame: int):
        ctx = ctx_of(sequence_id)
        frame_of(ctx, frame)
        with ctx.store.lock:
            return _json_response(_frame_document(ctx, frame))

    @app.put("/api/sequences/{sequence_id}/frames/{frame}/annotations")
    async def put_annotations(sequence_id: str, frame: int, request: Request):
        ctx = ctx_of(sequence_id)
        frame_of(ctx, frame)
        try:
            doc = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"body is not valid JSON ({exc})") from exc
        rows = _parse_put_rows(doc, frame, ctx.sequence_id)
        with ctx.store.lock:
            ctx.store.replace_frame(frame, rows)
            ctx.store.autosave_tick()
            return _json_response(_frame_document(ctx, frame))

    @app.post("/api/sequences/{sequence_id}/tracks/{track_id}/interpolate")
    async def interpolate(sequence_id: str, track_id: int, request: Request):
        ctx = ctx_of(sequence_id)
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"body is not valid JSON ({exc})") from exc
        if not isinstance(body, dict):
            raise SchemaError("body must be an object with start and end")
        start, end = body.get("start"), body.get("end")
        for name, value in (("start", start), ("end", end)):
            if not isinstance(value, int) or isinstance(value, bool):
                raise SchemaError(f"{name} must be an integer frame index")
        with ctx.store.lock:
            written = ctx.store.interpolate_range(track_id, start, end)
            ctx.store.autosave_tick()
        return _json_response(
            {"track_id": track_id, "start": start, "end": end, "written": written}
        )

    @app.get("/api/sequences/{sequence_id}/frames/{frame}/tracks/{track_id}/projections")
    def projections(sequence_id: str, frame: int, track_id: int):
        ctx = ctx_of(sequence_id)
        frame_of(ctx, frame)
        with ctx.store.lock:
            box = ctx.store.box(frame, track_id)
        visible = project_box_all(ctx.manifest.cameras, box)
        return _json_response(
            {
                "frame": frame,
                "track_id": track_id,
                "projections": [
                    {
                        "camera": pb.camera,
                        "rect": pb.rect_dict(),
                        "corners_px": [[u, v] for u, v in pb.corners_px],
                        "visible_corner_count": pb.visible_corner_count,
                    }
                    for pb in visible
                ],
            }
        )

    def _history(ctx: SessionContext, mover) -> Response:
        with ctx.store.lock:
            op = mover(ctx.store)
            ctx.store.autosave_tick()
        if op is None:
            return _json_response({"applied": False, "kind": None})
        return _json_response(
            {
                "applied": True,
                "kind": op.kind.value,
                "frame_index": op.frame_index,
                "track_id": op.track_id,
            }
        )

    @app.post("/api/sequences/{sequence_id}/undo")
    def undo(sequence_id: str):
        return _history(ctx_of(sequence_id), lambda s: s.undo())

    @app.post("/api/sequences/{sequence_id}/redo")
    def redo(sequence_id: str):
        return _history(ctx_of(sequence_id), lambda s: s.redo())

    @app.post("/api/sequences/{sequence_id}/evaluate")
    async def evaluate(sequence_id: str, request: Request):
        ctx = ctx_of(sequence_id)
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"body is not valid JSON ({exc})") from exc
        if not isinstance(body, dict) or not isinstance(body.get("gt_path"), str):
            raise SchemaError("body must be an object with a gt_path string")
        threshold = body.get("threshold", DEFAULT_IOU_THRESHOLD)
        if not isinstance(threshold, (int, float)) or isinstance(threshold, bool):
            raise SchemaError("threshold must be a number")
        if not 0.0 < float(threshold) < 1.0:
            raise SchemaError(f"threshold must be in (0, 1), got {threshold}")
        gt_path = (data_root / body["gt_path"]).resolve()
        if data_root not in gt_path.parents and gt_path != data_root:
            raise SchemaError("gt_path must stay inside the data root")
        if not gt_path.is_file():
            _fail(404, "missing-file", f"no ground-truth file at {body['gt_path']!r}")
        schema = "external-boxes" if gt_path.suffix == ".csv" else "native"
        gt = import_ground_truth(gt_path, schema=schema, sequence_id=ctx.sequence_id)
        with ctx.store.lock:
            pred = ctx.store.to_annotation_file()
        report = evaluate_sequence(pred, gt, float(threshold))
        return _json_response(report.to_dict())

    @app.get("/api/sequences/{sequence_id}/export")
    def export(sequence_id: str):
        ctx = ctx_of(sequence_id)
        with ctx.store.lock:
            file = ctx.store.to_annotation_file()
        return Response(content=annotation_bytes(file), media_type="application/json")

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(
    data_root,
    port: int = 8080,
    autosave_secs: float = 5.0,
    static_dir=None,
    host: str = "127.0.0.1",
) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(
        data_root,
        autosave_secs=autosave_secs,
        static_dir=static_dir,
        autosave_thread=True,
    )
    uvicorn.run(app, host=host, port=port)
