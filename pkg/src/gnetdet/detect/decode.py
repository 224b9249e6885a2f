"""Decoding the (10+C) x 14 x 14 detection tensor.

Channel layout per cell: 0-3 box 1 (x, y, w, h), 4-7 box 2, 8-9 the two
box confidences, 10.. class logits shared by both boxes. (x, y) are offsets
inside the cell, (w, h) fractions of the whole image. Raw values are clamped
to [0, 1]; no sigmoid is applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from gnetdet.detect.boxes import BoundingBox
from gnetdet.errors import ShapeError

GRID = 14
BOXES_PER_CELL = 2
CONF_OFFSET = 4 * BOXES_PER_CELL
CLASS_OFFSET = 5 * BOXES_PER_CELL


@dataclass(frozen=True)
class DecodeConfig:
    confidence_threshold: float = 0.10
    score_threshold: float = 0.20
    nms_iou_threshold: float = 0.45
    grid: int = GRID
    boxes_per_cell: int = BOXES_PER_CELL

    def __post_init__(self):
        for name in ("confidence_threshold", "score_threshold", "nms_iou_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.grid != GRID or self.boxes_per_cell != BOXES_PER_CELL:
            raise ValueError("grid is fixed at 14 and boxes_per_cell at 2")


def _check(output):
    out = np.asarray(output)
    if out.ndim != 3 or out.shape[0] < CLASS_OFFSET + 1 or out.shape[1:] != (GRID, GRID):
        raise ShapeError(f"detection tensor must be (10+C)x14x14 with C >= 1, got {out.shape}")
    return out


def decode(output, image_w: int, image_h: int, cfg: DecodeConfig = DecodeConfig()) -> list[BoundingBox]:
    """Turn raw head output into pixel-space boxes (before NMS).

    Boxes come out in (row, col, box) order.
    """
    out = _check(output).astype(np.float64)
    logits = out[CLASS_OFFSET:]
    z = logits - logits.max(axis=0, keepdims=True)
    e = np.exp(z)
    probs = e / e.sum(axis=0, keepdims=True)
    best_cls = probs.argmax(axis=0)
    best_p = probs.max(axis=0)

    cols = np.arange(GRID)[None, :]
    rows = np.arange(GRID)[:, None]
    per_box = []
    for b in range(BOXES_PER_CELL):
        x, y, w, h = np.clip(out[4 * b:4 * b + 4], 0.0, 1.0)
        conf = np.clip(out[CONF_OFFSET + b], 0.0, 1.0)
        cx = (cols + x) / GRID * image_w
        cy = (rows + y) / GRID * image_h
        bw = w * image_w
        bh = h * image_h
        x1 = np.clip(cx - bw / 2, 0.0, image_w)
        y1 = np.clip(cy - bh / 2, 0.0, image_h)
        x2 = np.clip(cx + bw / 2, 0.0, image_w)
        y2 = np.clip(cy + bh / 2, 0.0, image_h)
        score = conf * best_p
        mask = (conf >= cfg.confidence_threshold) & (score >= cfg.score_threshold)
        per_box.append((mask, x1, y1, x2, y2, score))

    boxes = []
    for r in range(GRID):
        for c in range(GRID):
            for mask, x1, y1, x2, y2, score in per_box:
                if mask[r, c]:
                    boxes.append(BoundingBox(int(best_cls[r, c]), float(score[r, c]), float(x1[r, c]),
                                             float(y1[r, c]), float(x2[r, c]), float(y2[r, c])))
    return boxes


def encode(boxes: Sequence[BoundingBox], image_w: int, image_h: int, num_classes: int,
           logit: float = 20.0) -> np.ndarray:
    """Inverse of :func:`decode` for at most one box per cell.

    Each box goes into slot 1 of the cell holding its centre with confidence
    1 and a one-hot class logit of ``logit``. Raises ValueError when two
    boxes land in the same cell.
    """
    out = np.zeros((CLASS_OFFSET + num_classes, GRID, GRID), dtype=np.float32)
    taken = set()
    for box in boxes:
        cx = (box.x1 + box.x2) / 2 / image_w * GRID
        cy = (box.y1 + box.y2) / 2 / image_h * GRID
        c = min(int(cx), GRID - 1)
        r = min(int(cy), GRID - 1)
        if (r, c) in taken:
            raise ValueError(f"two boxes share cell ({r}, {c})")
        taken.add((r, c))
        out[0:4, r, c] = (cx - c, cy - r, (box.x2 - box.x1) / image_w, (box.y2 - box.y1) / image_h)
        out[CONF_OFFSET, r, c] = 1.0
        out[CLASS_OFFSET + box.class_id, r, c] = logit
    return out
