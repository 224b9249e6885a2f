"""VOC-style detection evaluation: greedy IoU matching and interpolated AP.

The default is the VOC2007 11-point protocol at IoU 0.5. Ground truths
flagged ``difficult`` are not counted in the recall denominator, and a
detection whose best match is difficult is dropped instead of scored.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from gnetdet.detect.boxes import BoundingBox, iou


@dataclass(frozen=True)
class GroundTruthBox:
    image_id: str
    class_id: int
    x1: float
    y1: float
    x2: float
    y2: float
    difficult: bool = False

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)


@dataclass(frozen=True)
class Detection:
    image_id: str
    class_id: int
    score: float
    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    @classmethod
    def from_box(cls, image_id: str, box: BoundingBox) -> "Detection":
        return cls(image_id, box.class_id, box.score, box.x1, box.y1, box.x2, box.y2)


@dataclass(frozen=True)
class EvalResult:
    per_class_ap: dict = field(default_factory=dict)

    @property
    def map_score(self) -> float:
        if not self.per_class_ap:
            return 0.0
        return float(np.mean(list(self.per_class_ap.values())))

    def format(self, names: Sequence[str] | None = None) -> str:
        lines = []
        for cid in sorted(self.per_class_ap):
            label = names[cid] if names is not None and cid < len(names) else str(cid)
            lines.append(f"AP {label} {self.per_class_ap[cid]:.4f}")
        lines.append(f"mAP {self.map_score:.4f}")
        return "\n".join(lines) + "\n"


def _det_key(d: Detection):
    return (-d.score, d.image_id, d.x1, d.y1, d.x2, d.y2)


def match_detections(dets: Iterable[Detection], gts: Iterable[GroundTruthBox],
                     iou_threshold: float = 0.5) -> list[tuple[Detection, bool]]:
    """Score-ordered TP/FP flags for detections of a single class.

    Each detection is compared against every ground truth of its image; the
    one with the highest IoU decides. Already-claimed ground truths turn the
    detection into a false positive, difficult ones remove it from the list.
    """
    by_image: dict[str, list[GroundTruthBox]] = defaultdict(list)
    for g in gts:
        by_image[g.image_id].append(g)
    taken = {img: [False] * len(lst) for img, lst in by_image.items()}

    result = []
    for d in sorted(dets, key=_det_key):
        cands = by_image.get(d.image_id, ())
        best, best_iou = -1, -1.0
        for j, g in enumerate(cands):
            ov = iou(d, g)
            if ov > best_iou:
                best, best_iou = j, ov
        if best >= 0 and best_iou >= iou_threshold:
            if cands[best].difficult:
                continue
            if not taken[d.image_id][best]:
                taken[d.image_id][best] = True
                result.append((d, True))
            else:
                result.append((d, False))
        else:
            result.append((d, False))
    return result


def average_precision(tp_flags: Sequence[bool], num_gt: int, method: str = "11point") -> float:
    """AP from score-ordered TP flags.

    ``"11point"`` averages the interpolated precision at recall 0.0, 0.1, ...,
    1.0; ``"continuous"`` integrates the precision envelope over recall.
    """
    flags = np.asarray(tp_flags, dtype=bool)
    if num_gt <= 0 or flags.size == 0:
        return 0.0
    tp = np.cumsum(flags)
    fp = np.cumsum(~flags)
    recall = tp / num_gt
    precision = tp / (tp + fp)
    if method == "11point":
        total = 0.0
        for k in range(11):
            above = precision[recall >= k / 10]
            total += above.max() if above.size else 0.0
        return total / 11
    if method == "continuous":
        mrec = np.concatenate(([0.0], recall, [1.0]))
        mpre = np.concatenate(([0.0], precision, [0.0]))
        mpre = np.maximum.accumulate(mpre[::-1])[::-1]
        idx = np.nonzero(mrec[1:] != mrec[:-1])[0]
        return float(np.sum((mrec[idx + 1] - mrec[idx]) * mpre[idx + 1]))
    raise ValueError(f"unknown AP method {method!r}")


def evaluate(dets: Iterable[Detection], gts: Iterable[GroundTruthBox], iou_threshold: float = 0.5, *,
             classes: Iterable[int] | None = None, image_ids: Iterable[str] | None = None,
             method: str = "11point") -> EvalResult:
    """Per-class AP and their unweighted mean.

    ``classes`` defaults to every class that has a ground truth. Images
    without any ground truth must be announced through ``image_ids``,
    otherwise detections on them are rejected.
    """
    gts = list(gts)
    dets = list(dets)
    known = {g.image_id for g in gts} | set(image_ids or ())
    for d in dets:
        if d.image_id not in known:
            raise ValueError(f"detection refers to unknown image {d.image_id!r}")

    gt_by_cls: dict[int, list[GroundTruthBox]] = defaultdict(list)
    for g in gts:
        gt_by_cls[g.class_id].append(g)
    det_by_cls: dict[int, list[Detection]] = defaultdict(list)
    for d in dets:
        det_by_cls[d.class_id].append(d)

    class_ids = sorted(set(classes) if classes is not None else set(gt_by_cls))
    aps = {}
    for cid in class_ids:
        cls_gts = gt_by_cls.get(cid, [])
        num_gt = sum(not g.difficult for g in cls_gts)
        matched = match_detections(det_by_cls.get(cid, []), cls_gts, iou_threshold)
        aps[cid] = average_precision([tp for _, tp in matched], num_gt, method)
    return EvalResult(aps)
