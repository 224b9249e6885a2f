"""Vectorized numpy kernels (no JIT)."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def im2col3x3(x: np.ndarray, pad: int) -> np.ndarray:
    """Lower a (C, H, W) map to a (C*9, Ho*Wo) patch matrix.

    Row index is ``c*9 + ky*3 + kx`` so it lines up with a (O, C, 3, 3)
    kernel reshaped to (O, C*9).
    """
    if pad:
        x = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    c = x.shape[0]
    win = sliding_window_view(x, (3, 3), axis=(1, 2))  # (C, Ho, Wo, 3, 3)
    ho, wo = win.shape[1], win.shape[2]
    return np.ascontiguousarray(win.transpose(0, 3, 4, 1, 2)).reshape(c * 9, ho * wo)


def conv3x3(x, weight, bias, pad, parallel=False):
    c, h, w = x.shape
    ho, wo = h + 2 * pad - 2, w + 2 * pad - 2
    cols = im2col3x3(x, pad)
    out = weight.reshape(weight.shape[0], c * 9) @ cols
    out += bias[:, None]
    return out.reshape(weight.shape[0], ho, wo)


def maxpool2x2(x, parallel=False):
    c, h, w = x.shape
    return x.reshape(c, h // 2, 2, w // 2, 2).max(axis=(2, 4))


def nms_keep(x1, y1, x2, y2, cls, thresh):
    """Greedy suppression over boxes already sorted by descending priority.

    Returns a boolean keep mask. IoU is evaluated exactly as
    ``gnetdet.detect.iou`` does, in float64.
    """
    n = x1.shape[0]
    keep = np.zeros(n, dtype=np.bool_)
    alive = np.ones(n, dtype=np.bool_)
    area = (x2 - x1) * (y2 - y1)
    for i in range(n):
        if not alive[i]:
            continue
        keep[i] = True
        rest = np.arange(i + 1, n)
        rest = rest[alive[rest] & (cls[rest] == cls[i])]
        if rest.size == 0:
            continue
        iw = np.maximum(0.0, np.minimum(x2[i], x2[rest]) - np.maximum(x1[i], x1[rest]))
        ih = np.maximum(0.0, np.minimum(y2[i], y2[rest]) - np.maximum(y1[i], y1[rest]))
        inter = iw * ih
        union = area[i] + area[rest] - inter
        with np.errstate(divide="ignore", invalid="ignore"):
            ov = np.where(union > 0.0, inter / union, 0.0)
        alive[rest[ov > thresh]] = False
    return keep
