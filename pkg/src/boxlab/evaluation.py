"""Annotation quality control: matching, precision/recall/F1, IoU stats."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import SequenceMismatchError
from .geometry.iou import iou_matrix
from .io.annotations import AnnotationFile
from .types import Box3D, ClassLabel

DEFAULT_IOU_THRESHOLD = 0.6


@dataclass(frozen=True)
class MatchResult:
    """Greedy matching of one frame's predictions against ground truth."""

    frame_index: int
    pairs: tuple[tuple[int, int, float], ...]  # (gt_track, pred_track, iou)
    unmatched_gt: tuple[int, ...]
    unmatched_pred: tuple[int, ...]

    @property
    def tp(self) -> int:
        return len(self.pairs)

    @property
    def fp(self) -> int:
        return len(self.unmatched_pred)

    @property
    def fn(self) -> int:
        return len(self.unmatched_gt)


@dataclass(frozen=True)
class FrameMetrics:
    frame: int
    mean_iou: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class AggregateMetrics:
    mean_iou: float
    frac_iou_above_0_6: float
    precision: float
    recall: float
    f1: float
    per_class_counts: dict


@dataclass(frozen=True)
class MetricsReport:
    per_frame: tuple[FrameMetrics, ...]
    aggregate: AggregateMetrics

    def to_dict(self) -> dict:
        return {
            "per_frame": [
                {
                    "frame": m.frame,
                    "mean_iou": m.mean_iou,
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                }
                for m in self.per_frame
            ],
            "aggregate": {
                "mean_iou": self.aggregate.mean_iou,
                "frac_iou_above_0_6": self.aggregate.frac_iou_above_0_6,
                "precision": self.aggregate.precision,
                "recall": self.aggregate.recall,
                "f1": self.aggregate.f1,
                "per_class_counts": dict(self.aggregate.per_class_counts),
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MetricsReport":
        per_frame = tuple(
            FrameMetrics(
                frame=int(m["frame"]),
                mean_iou=float(m["mean_iou"]),
                precision=float(m["precision"]),
                recall=float(m["recall"]),
                f1=float(m["f1"]),
            )
            for m in doc["per_frame"]
        )
        agg = doc["aggregate"]
        aggregate = AggregateMetrics(
            mean_iou=float(agg["mean_iou"]),
            frac_iou_above_0_6=float(agg["frac_iou_above_0_6"]),
            precision=float(agg["precision"]),
            recall=float(agg["recall"]),
            f1=float(agg["f1"]),
            per_class_counts={str(k): int(v) for k, v in agg["per_class_counts"].items()},
        )
        return cls(per_frame=per_frame, aggregate=aggregate)


def precision(tp: int, fp: int) -> float:
    """TP / (TP + FP); 0 when there are no positives at all."""
    if tp < 0 or fp < 0:
        raise ValueError("counts must be non-negative")
    total = tp + fp
    return tp / total if total else 0.0


def recall(tp: int, fn: int) -> float:
    """TP / (TP + FN); 0 when there is nothing to recall."""
    if tp < 0 or fn < 0:
        raise ValueError("counts must be non-negative")
    total = tp + fn
    return tp / total if total else 0.0


def f1(p: float, r: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if p < 0 or r < 0:
        raise ValueError("precision and recall must be non-negative")
    total = p + r
    return 2.0 * p * r / total if total else 0.0


def _match_greedy(
    gts: list[Box3D],
    preds: list[Box3D],
    iou_threshold: float,
    frame_index: int,
    binding: dict | None = None,
) -> MatchResult:
    """Descending-IoU greedy matching.

    Candidate pairs are visited from highest IoU down, ties broken by
    (gt_track, pred_track) ascending; a pair is accepted when both sides
    are still unmatched and iou >= iou_threshold. Zero-overlap pairs are
    never accepted. When ``binding`` is given (track-consistent mode), a
    pair must also agree with the gt-to-pred track bijection accumulated so
    far, and accepted pairs extend it.
    """
    ious = iou_matrix(gts, preds)
    candidates = []
    for i, g in enumerate(gts):
        for j, p in enumerate(preds):
            v = float(ious[i, j])
            if v >= iou_threshold and v > 0.0:
                candidates.append((-v, g.track_id, p.track_id, i, j))
    candidates.sort()
    gt_used = [False] * len(gts)
    pred_used = [False] * len(preds)
    pairs = []
    for neg_v, g_track, p_track, i, j in candidates:
        if gt_used[i] or pred_used[j]:
            continue
        if binding is not None:
            bound_pred = binding.get(("gt", g_track))
            bound_gt = binding.get(("pred", p_track))
            if (bound_pred is not None and bound_pred != p_track) or (
                bound_gt is not None and bound_gt != g_track
            ):
                continue
        gt_used[i] = True
        pred_used[j] = True
        pairs.append((g_track, p_track, -neg_v))
        if binding is not None:
            binding[("gt", g_track)] = p_track
            binding[("pred", p_track)] = g_track
    return MatchResult(
        frame_index=frame_index,
        pairs=tuple(pairs),
        unmatched_gt=tuple(sorted(g.track_id for i, g in enumerate(gts) if not gt_used[i])),
        unmatched_pred=tuple(sorted(p.track_id for j, p in enumerate(preds) if not pred_used[j])),
    )


def match_frame(
    gts: list[Box3D],
    preds: list[Box3D],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    frame_index: int = 0,
) -> MatchResult:
    """Match one frame's predicted boxes against its ground-truth boxes."""
    if not 0.0 < iou_threshold < 1.0:
        raise ValueError(f"iou_threshold must be in (0, 1), got {iou_threshold}")
    return _match_greedy(gts, preds, iou_threshold, frame_index)


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def evaluate_sequence(
    pred: AnnotationFile,
    gt: AnnotationFile,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    track_consistent: bool = False,
) -> MetricsReport:
    """Compare two annotation files of the same sequence frame by frame.

    Per-frame and aggregate precision/recall/F1 come from greedy matching
    at ``iou_threshold``. ``frac_iou_above_0_6`` is the fraction of all
    ground-truth boxes whose match in an unthresholded greedy pass has
    IoU > 0.6. ``per_class_counts`` tallies the predicted boxes.

    ``track_consistent`` restricts matches to a single gt-to-pred track
    pairing accumulated across frames.
    """
    if pred.sequence_id != gt.sequence_id:
        raise SequenceMismatchError(
            f"cannot evaluate {pred.sequence_id!r} against {gt.sequence_id!r}"
        )
    frames = sorted(set(gt.frame_annotations) | set(pred.frame_annotations))
    binding: dict | None = {} if track_consistent else None
    loose_binding: dict | None = {} if track_consistent else None

    per_frame = []
    all_ious = []
    total_tp = total_fp = total_fn = 0
    high_iou_pairs = 0
    total_gt = gt.box_count()
    for frame in frames:
        g = gt.frame_annotations.get(frame, [])
        p = pred.frame_annotations.get(frame, [])
        result = _match_greedy(g, p, iou_threshold, frame, binding)
        frame_ious = [v for (_gt, _pr, v) in result.pairs]
        all_ious.extend(frame_ious)
        total_tp += result.tp
        total_fp += result.fp
        total_fn += result.fn
        fp_ = precision(result.tp, result.fp)
        fr_ = recall(result.tp, result.fn)
        per_frame.append(
            FrameMetrics(
                frame=frame,
                mean_iou=_mean(frame_ious),
                precision=fp_,
                recall=fr_,
                f1=f1(fp_, fr_),
            )
        )
        # Separate unthresholded pass: which gt boxes have a strong match?
        loose = _match_greedy(g, p, 0.0, frame, loose_binding)
        high_iou_pairs += sum(1 for (_gt, _pr, v) in loose.pairs if v > 0.6)

    agg_p = precision(total_tp, total_fp)
    agg_r = recall(total_tp, total_fn)
    counts = {label.value: 0 for label in ClassLabel}
    for _frame, box in pred.all_boxes():
        counts[box.class_label.value] += 1
    aggregate = AggregateMetrics(
        mean_iou=_mean(all_ious),
        frac_iou_above_0_6=high_iou_pairs / total_gt if total_gt else 0.0,
        precision=agg_p,
        recall=agg_r,
        f1=f1(agg_p, agg_r),
        per_class_counts=counts,
    )
    return MetricsReport(per_frame=tuple(per_frame), aggregate=aggregate)


METRIC_SERIES_HEADER = "frame,mean_iou,precision,recall,f1"


def export_metric_series(report: MetricsReport, path) -> None:
    """Write the per-frame metrics as a comma-separated table.

    Floats are written with shortest round-trip precision, so parsing the
    file back reproduces the report values exactly.
    """
    lines = [METRIC_SERIES_HEADER]
    for m in report.per_frame:
        lines.append(f"{m.frame},{m.mean_iou!r},{m.precision!r},{m.recall!r},{m.f1!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
