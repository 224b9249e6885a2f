"""Text formats: detections, ground truth, top-k classes, and VOC XML import.

Detection line:    <class_name_or_id> <score> <x1> <y1> <x2> <y2>
Ground-truth line: <image_id> <class_id> <x1> <y1> <x2> <y2> <difficult 0|1>
Prefixed detection (evaluation input): <image_id> followed by a detection line.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Iterable, Sequence

from gnetdet.detect.boxes import BoundingBox
from gnetdet.errors import FormatError
from gnetdet.evaluation import Detection, GroundTruthBox

VOC_CLASSES = (
    "aeroplane", "bicycle", "bird", "boat", "bottle", "bus", "car", "cat", "chair", "cow",
    "diningtable", "dog", "horse", "motorbike", "person", "pottedplant", "sheep", "sofa",
    "train", "tvmonitor",
)


def load_names(path) -> tuple[str, ...]:
    names = tuple(line.strip() for line in Path(path).read_text().splitlines() if line.strip())
    if not names:
        raise FormatError(f"class-name file {path} is empty")
    return names


def class_label(class_id: int, names: Sequence[str] | None) -> str:
    if names is not None and 0 <= class_id < len(names):
        return names[class_id]
    return str(class_id)


def class_from_label(label: str, names: Sequence[str] | None) -> int:
    try:
        return int(label)
    except ValueError:
        pass
    if names is not None and label in names:
        return list(names).index(label)
    raise FormatError(f"unknown class label {label!r}")


def format_detection(box: BoundingBox, names: Sequence[str] | None = None) -> str:
    return (f"{class_label(box.class_id, names)} {box.score:.6f} "
            f"{box.x1:.2f} {box.y1:.2f} {box.x2:.2f} {box.y2:.2f}")


def format_detections(boxes: Iterable[BoundingBox], names: Sequence[str] | None = None) -> str:
    return "".join(format_detection(b, names) + "\n" for b in boxes)


def parse_detection(line: str, names: Sequence[str] | None = None) -> BoundingBox:
    parts = line.split()
    if len(parts) != 6:
        raise FormatError(f"detection line needs 6 fields, got {len(parts)}: {line!r}")
    try:
        score, x1, y1, x2, y2 = map(float, parts[1:])
    except ValueError as exc:
        raise FormatError(f"bad number in detection line {line!r}") from exc
    return BoundingBox(class_from_label(parts[0], names), score, x1, y1, x2, y2)


def _lines(text: str):
    for raw in text.splitlines():
        raw = raw.strip()
        if raw and not raw.startswith("#"):
            yield raw


def read_detections(path, names: Sequence[str] | None = None) -> list[Detection]:
    """Read evaluation input.

    A directory holds one file per image (``<image_id>.txt``, plain detection
    lines); a single file holds ``<image_id>``-prefixed lines.
    """
    path = Path(path)
    dets = []
    if path.is_dir():
        for f in sorted(path.glob("*.txt")):
            for line in _lines(f.read_text()):
                dets.append(Detection.from_box(f.stem, parse_detection(line, names)))
    else:
        for line in _lines(path.read_text()):
            image_id, _, rest = line.partition(" ")
            dets.append(Detection.from_box(image_id, parse_detection(rest, names)))
    return dets


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def format_ground_truth(gts: Iterable[GroundTruthBox]) -> str:
    return "".join(f"{g.image_id} {g.class_id} {_num(g.x1)} {_num(g.y1)} {_num(g.x2)} {_num(g.y2)} "
                   f"{int(g.difficult)}\n" for g in gts)


def parse_ground_truth(text: str) -> list[GroundTruthBox]:
    gts = []
    for line in _lines(text):
        parts = line.split()
        if len(parts) != 7 or parts[6] not in ("0", "1"):
            raise FormatError(f"ground-truth line needs 7 fields ending in 0|1: {line!r}")
        try:
            x1, y1, x2, y2 = map(float, parts[2:6])
            gt = GroundTruthBox(parts[0], int(parts[1]), x1, y1, x2, y2, parts[6] == "1")
        except ValueError as exc:
            raise FormatError(f"bad number in ground-truth line {line!r}") from exc
        if gt.x2 < gt.x1 or gt.y2 < gt.y1:
            raise FormatError(f"ground-truth box has inverted corners: {line!r}")
        gts.append(gt)
    return gts


def read_ground_truth(path) -> list[GroundTruthBox]:
    return parse_ground_truth(Path(path).read_text())


def voc_xml_to_ground_truth(path, names: Sequence[str] = VOC_CLASSES) -> list[GroundTruthBox]:
    """Objects of one VOC annotation file. The image id is the file stem."""
    path = Path(path)
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    gts = []
    for obj in root.iter("object"):
        name = (obj.findtext("name") or "").strip()
        if name not in names:
            raise FormatError(f"{path}: unknown class {name!r}")
        bb = obj.find("bndbox")
        if bb is None:
            raise FormatError(f"{path}: object {name!r} has no bndbox")
        try:
            x1, y1, x2, y2 = (float(bb.findtext(k)) for k in ("xmin", "ymin", "xmax", "ymax"))
        except (TypeError, ValueError) as exc:
            raise FormatError(f"{path}: bad bndbox for {name!r}") from exc
        difficult = (obj.findtext("difficult") or "0").strip() == "1"
        gts.append(GroundTruthBox(path.stem, list(names).index(name), x1, y1, x2, y2, difficult))
    return gts
