"""The accelerator operator set: 3x3 convolution, ReLU, 2x2 max pooling,
plus the host-side softmax used when reading class scores."""

import numpy as np

from gnetdet import kernels
from gnetdet.errors import ShapeError
from gnetdet.nn.tensor import ConvKernel, Padding, as_tensor


def conv3x3(x, kernel: ConvKernel, padding: Padding = Padding.SAME, *, parallel: bool = False) -> np.ndarray:
    """Stride-1 3x3 cross-correlation plus bias.

    ``Padding.SAME`` zero-pads a 1-pixel border and keeps H x W;
    ``Padding.VALID`` shrinks each spatial dimension by 2.
    """
    x = as_tensor(x)
    padding = Padding(padding)
    c, h, w = x.shape
    if c != kernel.in_channels:
        raise ShapeError(f"input has {c} channels, kernel expects {kernel.in_channels}")
    if padding is Padding.VALID and (h < 3 or w < 3):
        raise ShapeError(f"valid 3x3 convolution needs at least 3x3 input, got {h}x{w}")
    return kernels.conv3x3(x, kernel.weight, kernel.bias, padding.width, parallel)


def relu(x) -> np.ndarray:
    return np.maximum(as_tensor(x), 0)


def maxpool2x2(x, *, parallel: bool = False) -> np.ndarray:
    """Non-overlapping 2x2 max pooling, stride 2."""
    x = as_tensor(x)
    _, h, w = x.shape
    if h % 2 or w % 2:
        raise ShapeError(f"2x2 pooling needs even spatial size, got {h}x{w}")
    return kernels.maxpool2x2(x, parallel)


def softmax(scores) -> np.ndarray:
    """Max-shifted softmax over a 1-D vector, computed in float64."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("softmax of an empty vector")
    e = np.exp(s - s.max())
    return e / e.sum()
