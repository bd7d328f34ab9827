"""In-memory annotation state with reversible edits and autosave.

One store holds one sequence's labels. Every mutation goes through an
EditOp carrying absolute before/after snapshots, so undo and redo are
plain snapshot swaps and a recorded op can be replayed on another store
byte for byte.
"""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import (
    FrameRangeError,
    MissingAnnotationError,
    MissingKeyframeError,
    OrderingError,
    UnknownTrackError,
)
from .geometry.box import MIN_DIM, interpolate_track
from .io.annotations import AnnotationFile, save_annotations
from .types import Box3D, ClassLabel, Vec3


class OpKind(str, Enum):
    CREATE = "Create"
    DELETE = "Delete"
    SET_POSE = "SetPose"
    SET_DIMS = "SetDims"
    SET_YAW = "SetYaw"
    SET_CLASS = "SetClass"
    INTERPOLATE_RANGE = "InterpolateRange"
    MARK_KEYFRAME = "MarkKeyframe"


# (frame_index, track_id) -> box after/before the op; None means absent.
_BoxDelta = tuple[tuple[tuple[int, int], Box3D | None], ...]


@dataclass(frozen=True)
class EditOp:
    """One reversible edit.

    ``boxes_before`` and ``boxes_after`` snapshot the same keys, so the op
    can be applied or inverted without any external context. Keyframe
    bookkeeping travels with the op for the same reason.
    """

    kind: OpKind
    frame_index: int
    track_id: int
    boxes_before: _BoxDelta = ()
    boxes_after: _BoxDelta = ()
    keyframes_added: tuple[tuple[int, int], ...] = ()  # (track_id, frame)
    keyframes_removed: tuple[tuple[int, int], ...] = ()


def _clamped_dims(dims: Vec3) -> Vec3:
    return Vec3(max(MIN_DIM, dims.x), max(MIN_DIM, dims.y), max(MIN_DIM, dims.z))


class AnnotationStore:
    """Authoritative annotation state for one sequence.

    Not internally synchronized: callers that share a store across threads
    must hold ``store.lock`` around every call (the HTTP layer does).
    """

    def __init__(
        self,
        sequence_id: str,
        frame_count: int,
        save_path=None,
        autosave_secs: float = 5.0,
        clock=time.monotonic,
    ):
        if frame_count <= 0:
            raise ValueError(f"frame_count must be positive, got {frame_count}")
        self.sequence_id = sequence_id
        self.frame_count = frame_count
        self.save_path = Path(save_path) if save_path is not None else None
        self.autosave_secs = float(autosave_secs)
        self.annotations: dict[tuple[int, int], Box3D] = {}
        self.keyframes: dict[int, set[int]] = {}
        self.next_track_id = 0
        self.undo_stack: list[EditOp] = []
        self.redo_stack: list[EditOp] = []
        self.dirty = False
        self.lock = threading.RLock()
        self._clock = clock
        self._last_save: float | None = None

    # -- loading ---------------------------------------------------------

    @classmethod
    def from_file(
        cls,
        file: AnnotationFile,
        frame_count: int,
        save_path=None,
        autosave_secs: float = 5.0,
        clock=time.monotonic,
    ) -> "AnnotationStore":
        """Seed a store from a loaded annotation file.

        The interchange format carries no keyframe flags, so every stored
        box becomes a keyframe: each is treated as a deliberate control
        point, and interpolation never silently overwrites loaded data.
        """
        store = cls(file.sequence_id, frame_count, save_path, autosave_secs, clock)
        for frame, box in file.all_boxes():
            if frame >= frame_count:
                raise FrameRangeError(
                    f"annotation on frame {frame} but sequence has {frame_count} frames"
                )
            store.annotations[(frame, box.track_id)] = box
            store.keyframes.setdefault(box.track_id, set()).add(frame)
            store.next_track_id = max(store.next_track_id, box.track_id + 1)
        return store

    def to_annotation_file(self) -> AnnotationFile:
        frame_annotations: dict[int, list[Box3D]] = {}
        for (frame, _track), box in sorted(self.annotations.items()):
            frame_annotations.setdefault(frame, []).append(box)
        return AnnotationFile(
            sequence_id=self.sequence_id, frame_annotations=frame_annotations
        )

    # -- reads -----------------------------------------------------------

    def box(self, frame: int, track_id: int) -> Box3D:
        try:
            return self.annotations[(frame, track_id)]
        except KeyError:
            raise MissingAnnotationError(
                f"no annotation for track {track_id} on frame {frame}"
            ) from None

    def boxes_for_frame(self, frame: int) -> list[Box3D]:
        self._check_frame(frame)
        return [
            box
            for (f, _t), box in sorted(self.annotations.items())
            if f == frame
        ]

    def track_frames(self, track_id: int) -> list[int]:
        return sorted(f for (f, t) in self.annotations if t == track_id)

    def keyframes_of(self, track_id: int) -> list[int]:
        return sorted(self.keyframes.get(track_id, ()))

    def content_state(self):
        """Annotations, keyframes and the id counter as comparable values.

        Excludes the undo/redo stacks and the dirty flag.
        """
        return (
            dict(self.annotations),
            {t: frozenset(fs) for t, fs in self.keyframes.items() if fs},
            self.next_track_id,
        )

    # -- op machinery ------------------------------------------------------

    def _check_frame(self, frame: int) -> None:
        if not 0 <= frame < self.frame_count:
            raise FrameRangeError(
                f"frame {frame} out of range [0, {self.frame_count})"
            )

    def _apply(self, op: EditOp) -> None:
        for key, box in op.boxes_after:
            if box is None:
                self.annotations.pop(key, None)
            else:
                self.annotations[key] = box
                self.next_track_id = max(self.next_track_id, key[1] + 1)
        for track, frame in op.keyframes_added:
            self.keyframes.setdefault(track, set()).add(frame)
        for track, frame in op.keyframes_removed:
            marks = self.keyframes.get(track)
            if marks is not None:
                marks.discard(frame)
                if not marks:
                    del self.keyframes[track]

    def _revert(self, op: EditOp) -> None:
        for key, box in op.boxes_before:
            if box is None:
                self.annotations.pop(key, None)
            else:
                self.annotations[key] = box
        for track, frame in op.keyframes_added:
            marks = self.keyframes.get(track)
            if marks is not None:
                marks.discard(frame)
                if not marks:
                    del self.keyframes[track]
        for track, frame in op.keyframes_removed:
            self.keyframes.setdefault(track, set()).add(frame)
        # Track ids are never reused: the counter does not roll back.

    def apply_op(self, op: EditOp) -> None:
        """Apply a recorded op as a new edit (clears the redo stack)."""
        self._apply(op)
        self.undo_stack.append(op)
        self.redo_stack.clear()
        self.dirty = True

    # -- edits -------------------------------------------------------------

    def create_annotation(self, frame: int, box: Box3D) -> int:
        """Add a box on `frame` as a brand-new track; returns the track id.

        The box's own track_id is ignored. The frame is marked as a
        keyframe of the new track.
        """
        self._check_frame(frame)
        track_id = self.next_track_id
        placed = replace(box, track_id=track_id)
        op = EditOp(
            kind=OpKind.CREATE,
            frame_index=frame,
            track_id=track_id,
            boxes_before=(((frame, track_id), None),),
            boxes_after=(((frame, track_id), placed),),
            keyframes_added=((track_id, frame),),
        )
        self.apply_op(op)
        return track_id

    def add_track_box(self, frame: int, track_id: int, box: Box3D) -> None:
        """Place a box for an existing track on a frame it does not cover.

        Marks the frame as a keyframe (an explicitly placed box is a
        control point).
        """
        self._check_frame(frame)
        if not any(t == track_id for (_f, t) in self.annotations):
            raise UnknownTrackError(f"track {track_id} does not exist")
        if (frame, track_id) in self.annotations:
            raise ValueError(f"track {track_id} already has a box on frame {frame}")
        placed = replace(box, track_id=track_id)
        existing_class = next(
            b.class_label for (_f, t), b in self.annotations.items() if t == track_id
        )
        if placed.class_label != existing_class:
            raise ValueError(
                f"track {track_id} is {existing_class.value}, "
                f"cannot add a {placed.class_label.value} box"
            )
        op = EditOp(
            kind=OpKind.CREATE,
            frame_index=frame,
            track_id=track_id,
            boxes_before=(((frame, track_id), None),),
            boxes_after=(((frame, track_id), placed),),
            keyframes_added=((track_id, frame),),
        )
        self.apply_op(op)

    def edit_annotation(
        self,
        frame: int,
        track_id: int,
        *,
        center: Vec3 | None = None,
        dims: Vec3 | None = None,
        yaw: float | None = None,
        class_label: ClassLabel | None = None,
    ) -> None:
        """Apply exactly one delta to an existing annotation.

        Dims clamp at 0.01 m per component. A class change applies to the
        whole track so a track never mixes classes.
        """
        given = [v is not None for v in (center, dims, yaw, class_label)]
        if sum(given) != 1:
            raise ValueError("exactly one of center/dims/yaw/class_label must be given")
        old = self.box(frame, track_id)
        if center is not None:
            new = replace(old, center=center)
            kind = OpKind.SET_POSE
        elif dims is not None:
            new = replace(old, dims=_clamped_dims(dims))
            kind = OpKind.SET_DIMS
        elif yaw is not None:
            new = replace(old, yaw=yaw)  # Box3D wraps to (-pi, pi]
            kind = OpKind.SET_YAW
        else:
            self._set_class(frame, track_id, class_label)
            return
        op = EditOp(
            kind=kind,
            frame_index=frame,
            track_id=track_id,
            boxes_before=(((frame, track_id), old),),
            boxes_after=(((frame, track_id), new),),
        )
        self.apply_op(op)

    def _set_class(self, frame: int, track_id: int, label: ClassLabel) -> None:
        keys = sorted(k for k in self.annotations if k[1] == track_id)
        before = tuple((k, self.annotations[k]) for k in keys)
        after = tuple((k, replace(self.annotations[k], class_label=label)) for k in keys)
        op = EditOp(
            kind=OpKind.SET_CLASS,
            frame_index=frame,
            track_id=track_id,
            boxes_before=before,
            boxes_after=after,
        )
        self.apply_op(op)

    def delete_box(self, frame: int, track_id: int) -> None:
        """Remove one frame's box of a track (and its keyframe mark)."""
        old = self.box(frame, track_id)
        removed = ((track_id, frame),) if frame in self.keyframes.get(track_id, ()) else ()
        op = EditOp(
            kind=OpKind.DELETE,
            frame_index=frame,
            track_id=track_id,
            boxes_before=(((frame, track_id), old),),
            boxes_after=(((frame, track_id), None),),
            keyframes_removed=removed,
        )
        self.apply_op(op)

    def delete_track(self, track_id: int) -> int:
        """Remove a track from every frame as one op; returns boxes removed."""
        keys = sorted(k for k in self.annotations if k[1] == track_id)
        if not keys:
            raise UnknownTrackError(f"track {track_id} does not exist")
        before = tuple((k, self.annotations[k]) for k in keys)
        after = tuple((k, None) for k in keys)
        removed = tuple((track_id, f) for f in sorted(self.keyframes.get(track_id, ())))
        op = EditOp(
            kind=OpKind.DELETE,
            frame_index=keys[0][0],
            track_id=track_id,
            boxes_before=before,
            boxes_after=after,
            keyframes_removed=removed,
        )
        self.apply_op(op)
        return len(keys)

    def mark_keyframe(self, frame: int, track_id: int) -> bool:
        """Mark an annotated frame as a control point for interpolation.

        Returns False (and records nothing) when already marked.
        """
        self.box(frame, track_id)  # must exist
        if frame in self.keyframes.get(track_id, ()):
            return False
        op = EditOp(
            kind=OpKind.MARK_KEYFRAME,
            frame_index=frame,
            track_id=track_id,
            keyframes_added=((track_id, frame),),
        )
        self.apply_op(op)
        return True

    def interpolate_range(self, track_id: int, start_frame: int, end_frame: int) -> int:
        """Fill every non-keyframe frame between two keyframes of a track.

        Interior keyframes split the range into piecewise segments and are
        never overwritten. The whole fill is one op, so a single undo
        reverts it. Returns the number of boxes written.
        """
        if start_frame >= end_frame:
            raise OrderingError(
                f"interpolation range must satisfy start < end, got {start_frame} >= {end_frame}"
            )
        self._check_frame(start_frame)
        self._check_frame(end_frame)
        marks = self.keyframes.get(track_id, set())
        for f in (start_frame, end_frame):
            if f not in marks:
                raise MissingKeyframeError(
                    f"frame {f} is not a keyframe of track {track_id}"
                )
        segment_bounds = sorted(f for f in marks if start_frame <= f <= end_frame)
        writes: list[tuple[int, Box3D]] = []
        for a, b in zip(segment_bounds, segment_bounds[1:]):
            writes.extend(
                interpolate_track((a, self.box(a, track_id)), (b, self.box(b, track_id)))
            )
        if not writes:
            return 0
        before = tuple(
            ((f, track_id), self.annotations.get((f, track_id))) for f, _ in writes
        )
        after = tuple(((f, track_id), box) for f, box in writes)
        op = EditOp(
            kind=OpKind.INTERPOLATE_RANGE,
            frame_index=start_frame,
            track_id=track_id,
            boxes_before=before,
            boxes_after=after,
        )
        self.apply_op(op)
        return len(writes)

    # -- undo / redo -------------------------------------------------------

    def undo(self) -> EditOp | None:
        """Revert the most recent op; None when there is nothing to undo."""
        if not self.undo_stack:
            return None
        op = self.undo_stack.pop()
        self._revert(op)
        self.redo_stack.append(op)
        self.dirty = True
        return op

    def redo(self) -> EditOp | None:
        """Reapply the most recently undone op; None when there is none."""
        if not self.redo_stack:
            return None
        op = self.redo_stack.pop()
        self._apply(op)
        self.undo_stack.append(op)
        self.dirty = True
        return op

    # -- frame replacement (HTTP PUT) ---------------------------------------

    def replace_frame(
        self, frame: int, rows: list[tuple[int | None, Box3D]]
    ) -> int:
        """Reconcile one frame's boxes against a submitted list.

        Each row is (track_id, box); a track_id of None requests a new
        track. Emits primitive ops (deletes, creates, per-aspect edits) and
        returns how many were recorded; identical content records nothing.
        """
        self._check_frame(frame)
        ids = [t for t, _ in rows if t is not None]
        if len(set(ids)) != len(ids):
            raise ValueError(f"frame {frame}: duplicate track ids in submitted boxes")
        current = {t: b for (f, t), b in self.annotations.items() if f == frame}
        known_tracks = {t for (_f, t) in self.annotations}
        for t, _ in rows:
            if t is not None and t not in known_tracks:
                raise UnknownTrackError(f"track {t} does not exist")
        ops = 0
        submitted = set(ids)
        for t in sorted(current):
            if t not in submitted:
                self.delete_box(frame, t)
                ops += 1
        for t, box in rows:
            if t is None:
                self.create_annotation(frame, box)
                ops += 1
            elif t not in current:
                self.add_track_box(frame, t, box)
                ops += 1
            else:
                old = current[t]
                if box.class_label != old.class_label:
                    self.edit_annotation(frame, t, class_label=box.class_label)
                    ops += 1
                if box.center != old.center:
                    self.edit_annotation(frame, t, center=box.center)
                    ops += 1
                if _clamped_dims(box.dims) != old.dims:
                    self.edit_annotation(frame, t, dims=box.dims)
                    ops += 1
                if box.yaw != old.yaw:
                    self.edit_annotation(frame, t, yaw=box.yaw)
                    ops += 1
        return ops

    # -- persistence ---------------------------------------------------------

    def save(self, now: float | None = None) -> None:
        """Persist unconditionally (atomic write) and clear the dirty flag."""
        if self.save_path is None:
            raise ValueError("store has no save path")
        save_annotations(self.to_annotation_file(), self.save_path)
        self.dirty = False
        self._last_save = self._clock() if now is None else now

    def autosave_tick(self, now: float | None = None) -> bool:
        """Save when dirty and the debounce interval has passed.

        Returns True when a save happened. A failed save leaves the dirty
        flag (and all in-memory state) untouched.
        """
        if not self.dirty or self.save_path is None:
            return False
        if now is None:
            now = self._clock()
        if self._last_save is not None and now - self._last_save < self.autosave_secs:
            return False
        self.save(now)
        return True
