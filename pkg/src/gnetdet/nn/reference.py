"""Direct-loop reference implementations.

These are deliberately naive and share no code with the optimized kernels;
the test suite treats them as ground truth.
"""

import math

import numpy as np


def conv3x3_direct(x, weight, bias, pad):
    c_in, h, w = x.shape
    c_out = weight.shape[0]
    ho, wo = h + 2 * pad - 2, w + 2 * pad - 2
    out = np.zeros((c_out, ho, wo), dtype=np.float64)
    for o in range(c_out):
        for oy in range(ho):
            for ox in range(wo):
                acc = float(bias[o])
                for c in range(c_in):
                    for ky in range(3):
                        for kx in range(3):
                            iy = oy + ky - pad
                            ix = ox + kx - pad
                            if 0 <= iy < h and 0 <= ix < w:
                                acc += float(weight[o, c, ky, kx]) * float(x[c, iy, ix])
                out[o, oy, ox] = acc
    return out


def maxpool2x2_direct(x):
    c, h, w = x.shape
    out = np.empty((c, h // 2, w // 2), dtype=x.dtype)
    for ci in range(c):
        for oy in range(h // 2):
            for ox in range(w // 2):
                best = x[ci, 2 * oy, 2 * ox]
                for dy in range(2):
                    for dx in range(2):
                        v = x[ci, 2 * oy + dy, 2 * ox + dx]
                        if v > best:
                            best = v
                out[ci, oy, ox] = best
    return out


def relu_direct(values):
    return [v if v > 0 else 0.0 for v in values]


def softmax_direct(values):
    m = max(values)
    exps = [math.exp(v - m) for v in values]
    total = math.fsum(exps)
    return [e / total for e in exps]
