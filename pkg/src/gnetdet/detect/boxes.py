"""Bounding boxes, IoU and greedy per-class NMS."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from gnetdet import kernels


@dataclass(frozen=True)
class BoundingBox:
    class_id: int
    score: float
    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    iw = max(0.0, min(a.x2, b.x2) - max(a.x1, b.x1))
    ih = max(0.0, min(a.y2, b.y2) - max(a.y1, b.y1))
    inter = iw * ih
    union = a.area + b.area - inter
    return inter / union if union > 0.0 else 0.0


def sort_key(box: BoundingBox):
    """Score descending, then x1, then y1, then class id."""
    return (-box.score, box.x1, box.y1, box.class_id)


def nms(boxes: Sequence[BoundingBox], iou_threshold: float = 0.45) -> list[BoundingBox]:
    """Greedy NMS run independently per class.

    A box is dropped when its IoU with an already kept, higher-priority box
    of the same class is strictly greater than ``iou_threshold``. The result
    is sorted by :func:`sort_key`.
    """
    if not 0.0 <= iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold must be in [0, 1], got {iou_threshold}")
    ordered = sorted(boxes, key=sort_key)
    if not ordered:
        return []
    arr = np.array([(b.x1, b.y1, b.x2, b.y2) for b in ordered], dtype=np.float64)
    cls = np.array([b.class_id for b in ordered], dtype=np.int64)
    keep = kernels.nms_keep(np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1]),
                            np.ascontiguousarray(arr[:, 2]), np.ascontiguousarray(arr[:, 3]),
                            cls, float(iou_threshold))
    return [b for b, k in zip(ordered, keep) if k]
