"""Numba kernels. Patch extraction runs under @njit; the GEMM stays in numpy
so both backends feed BLAS the identical patch matrix."""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _im2col(x, pad, cols):
    c, h, w = x.shape
    ho = h + 2 * pad - 2
    wo = w + 2 * pad - 2
    for ci in range(c):
        for ky in range(3):
            for kx in range(3):
                row = ci * 9 + ky * 3 + kx
                for oy in range(ho):
                    iy = oy + ky - pad
                    base = oy * wo
                    if iy < 0 or iy >= h:
                        for ox in range(wo):
                            cols[row, base + ox] = 0.0
                        continue
                    for ox in range(wo):
                        ix = ox + kx - pad
                        if ix < 0 or ix >= w:
                            cols[row, base + ox] = 0.0
                        else:
                            cols[row, base + ox] = x[ci, iy, ix]


@njit(parallel=True, cache=True)
def _im2col_par(x, pad, cols):
    c, h, w = x.shape
    ho = h + 2 * pad - 2
    wo = w + 2 * pad - 2
    for row in prange(c * 9):
        ci = row // 9
        ky = (row % 9) // 3
        kx = row % 3
        for oy in range(ho):
            iy = oy + ky - pad
            base = oy * wo
            for ox in range(wo):
                ix = ox + kx - pad
                if iy < 0 or iy >= h or ix < 0 or ix >= w:
                    cols[row, base + ox] = 0.0
                else:
                    cols[row, base + ox] = x[ci, iy, ix]


def im2col3x3(x, pad, parallel=False):
    c, h, w = x.shape
    cols = np.empty((c * 9, (h + 2 * pad - 2) * (w + 2 * pad - 2)), dtype=x.dtype)
    (_im2col_par if parallel else _im2col)(x, pad, cols)
    return cols


def conv3x3(x, weight, bias, pad, parallel=False):
    c, h, w = x.shape
    ho, wo = h + 2 * pad - 2, w + 2 * pad - 2
    cols = im2col3x3(x, pad, parallel)
    out = weight.reshape(weight.shape[0], c * 9) @ cols
    out += bias[:, None]
    return out.reshape(weight.shape[0], ho, wo)


@njit(cache=True)
def _maxpool(x, out):
    c, ho, wo = out.shape
    for ci in range(c):
        for oy in range(ho):
            for ox in range(wo):
                m = x[ci, 2 * oy, 2 * ox]
                v = x[ci, 2 * oy, 2 * ox + 1]
                if v > m:
                    m = v
                v = x[ci, 2 * oy + 1, 2 * ox]
                if v > m:
                    m = v
                v = x[ci, 2 * oy + 1, 2 * ox + 1]
                if v > m:
                    m = v
                out[ci, oy, ox] = m


@njit(parallel=True, cache=True)
def _maxpool_par(x, out):
    c, ho, wo = out.shape
    for ci in prange(c):
        for oy in range(ho):
            for ox in range(wo):
                m = x[ci, 2 * oy, 2 * ox]
                m = max(m, x[ci, 2 * oy, 2 * ox + 1])
                m = max(m, x[ci, 2 * oy + 1, 2 * ox])
                m = max(m, x[ci, 2 * oy + 1, 2 * ox + 1])
                out[ci, oy, ox] = m


def maxpool2x2(x, parallel=False):
    c, h, w = x.shape
    out = np.empty((c, h // 2, w // 2), dtype=x.dtype)
    (_maxpool_par if parallel else _maxpool)(x, out)
    return out


@njit(cache=True)
def nms_keep(x1, y1, x2, y2, cls, thresh):
    n = x1.shape[0]
    keep = np.zeros(n, dtype=np.bool_)
    alive = np.ones(n, dtype=np.bool_)
    for i in range(n):
        if not alive[i]:
            continue
        keep[i] = True
        area_i = (x2[i] - x1[i]) * (y2[i] - y1[i])
        for j in range(i + 1, n):
            if not alive[j] or cls[j] != cls[i]:
                continue
            iw = max(0.0, min(x2[i], x2[j]) - max(x1[i], x1[j]))
            ih = max(0.0, min(y2[i], y2[j]) - max(y1[i], y1[j]))
            inter = iw * ih
            union = area_i + (x2[j] - x1[j]) * (y2[j] - y1[j]) - inter
            ov = inter / union if union > 0.0 else 0.0
            if ov > thresh:
                alive[j] = False
    return keep
