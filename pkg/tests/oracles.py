"""Independent second implementations used as test oracles."""

from collections import defaultdict


def box_iou(a, b):
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = (a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter
    return inter / union if union > 0 else 0.0


def nms_pairwise(boxes, thresh):
    """Keep a box iff no kept, higher-priority box of its class overlaps it by more than thresh."""
    order = sorted(boxes, key=lambda b: (-b.score, b.x1, b.y1, b.class_id))
    kept = []
    for b in order:
        if all(k.class_id != b.class_id or box_iou(k, b) <= thresh for k in kept):
            kept.append(b)
    return kept


def ap_11point(flags, num_gt):
    if num_gt == 0 or not flags:
        return 0.0
    tp = fp = 0
    curve = []
    for f in flags:
        tp += f
        fp += not f
        curve.append((tp / num_gt, tp / (tp + fp)))
    total = 0.0
    for k in range(11):
        ps = [p for r, p in curve if r >= k / 10]
        total += max(ps) if ps else 0.0
    return total / 11


def voc_map(dets, gts, thresh=0.5):
    """Straightforward VOC2007 evaluator written from the protocol description."""
    classes = sorted({g.class_id for g in gts})
    aps = {}
    for c in classes:
        gt_c = [g for g in gts if g.class_id == c]
        npos = len([g for g in gt_c if not g.difficult])
        used = defaultdict(set)
        flags = []
        for d in sorted((d for d in dets if d.class_id == c),
                        key=lambda d: (-d.score, d.image_id, d.x1, d.y1, d.x2, d.y2)):
            cands = [(i, g) for i, g in enumerate(gt_c) if g.image_id == d.image_id]
            best_i, best_ov = None, 0.0
            for i, g in cands:
                ov = box_iou(d, g)
                if best_i is None or ov > best_ov:
                    best_i, best_ov = i, ov
            if best_i is not None and best_ov >= thresh:
                if gt_c[best_i].difficult:
                    continue
                if best_i in used[d.image_id]:
                    flags.append(False)
                else:
                    used[d.image_id].add(best_i)
                    flags.append(True)
            else:
                flags.append(False)
        aps[c] = ap_11point(flags, npos)
    return sum(aps.values()) / len(aps), aps
