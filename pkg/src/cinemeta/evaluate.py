"""Prediction-vs-truth scoring over two catalogs.

Scoring is exact-match per label over the clips both catalogs contain.
Counts stay integers until presentation, so accuracies are exact rationals
formatted at print time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .model import MetadataRecord

EVAL_LABELS = (
    "SceneNum",
    "ShotNum",
    "TakeNum",
    "Time",
    "PID",
    "ShotScale",
    "CameraMove",
    "SceneType",
)
_ROW_WIDTH = 4


class EvalError(ValueError):
    pass


class EmptyIntersectionError(EvalError):
    """Prediction and truth catalogs share no clip ids."""


@dataclass(frozen=True)
class EvalReport:
    counts: dict[str, tuple[int, int]]  # label -> (correct, total)
    n_clips: int

    def accuracy(self, label: str) -> float:
        correct, total = self.counts[label]
        return correct / total

    @property
    def labels(self) -> tuple[str, ...]:
        """Labels with at least one scored clip, in canonical order."""
        return tuple(k for k in self.counts if self.counts[k][1] > 0)


def _scalar(attr: str) -> Callable[[MetadataRecord], object]:
    def get(record: MetadataRecord) -> object:
        av = getattr(record.semantic, attr)
        return None if av is None else av.value

    return get


_GETTERS: dict[str, Callable[[MetadataRecord], object]] = {
    "SceneNum": _scalar("scene_num"),
    "ShotNum": _scalar("shot_num"),
    "TakeNum": _scalar("take_num"),
    "Time": _scalar("time"),
    "ShotScale": _scalar("shot_type"),
    "CameraMove": _scalar("camera_move"),
    "SceneType": _scalar("scene_type"),
}


def _pids(record: MetadataRecord) -> set[str]:
    return {av.value.pid for av in record.semantic.actors}


def _objects(record: MetadataRecord) -> set[str]:
    return {av.value for av in record.semantic.objects}


def evaluate(
    predictions: list[MetadataRecord],
    truth: list[MetadataRecord],
    include_objects: bool = False,
) -> EvalReport:
    """Score predictions against truth on the clips present in both.

    A label is scored on a clip only when the truth record carries it;
    a missing prediction then counts as wrong. PID is correct when the
    predicted actor set covers every truth pid. ObjectType (opt-in) scores
    the same way over object label sets.
    """

    pred_by_id = {str(r.clip_id): r for r in predictions}
    truth_by_id = {str(r.clip_id): r for r in truth}
    common = [cid for cid in truth_by_id if cid in pred_by_id]
    if not common:
        raise EmptyIntersectionError(
            f"no shared clip ids ({len(predictions)} predicted, {len(truth)} truth)"
        )

    labels = EVAL_LABELS + (("ObjectType",) if include_objects else ())
    correct = {label: 0 for label in labels}
    total = {label: 0 for label in labels}
    for cid in common:
        p, t = pred_by_id[cid], truth_by_id[cid]
        for label in labels:
            if label == "PID":
                want = _pids(t)
                if not want:
                    continue
                total[label] += 1
                if want <= _pids(p):
                    correct[label] += 1
            elif label == "ObjectType":
                want_objs = _objects(t)
                if not want_objs:
                    continue
                total[label] += 1
                if want_objs <= _objects(p):
                    correct[label] += 1
            else:
                truth_value = _GETTERS[label](t)
                if truth_value is None:
                    continue
                total[label] += 1
                if _GETTERS[label](p) == truth_value:
                    correct[label] += 1

    counts = {label: (correct[label], total[label]) for label in labels}
    return EvalReport(counts=counts, n_clips=len(common))


def format_report(report: EvalReport) -> str:
    """Render the accuracy table: label header rows over Accuracy rows."""

    labels = report.labels
    lines = [f"clips evaluated: {report.n_clips}"]
    for start in range(0, len(labels), _ROW_WIDTH):
        group = labels[start : start + _ROW_WIDTH]
        lines.append("\t" + "\t".join(group))
        lines.append(
            "Accuracy\t"
            + "\t".join(f"{report.accuracy(label):.3f}" for label in group)
        )
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvalReport) -> dict:
    return {
        "n_clips": report.n_clips,
        "labels": {
            label: {
                "correct": report.counts[label][0],
                "total": report.counts[label][1],
                "accuracy": report.accuracy(label),
            }
            for label in report.labels
        },
    }
