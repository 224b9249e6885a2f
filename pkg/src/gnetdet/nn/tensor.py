"""Tensor conventions and the 3x3 kernel type.

A tensor is a C-contiguous float32 ``numpy.ndarray`` of shape
(channels, height, width), so element (c, y, x) sits at flat index
``c*H*W + y*W + x``. Operators never write into their inputs.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from gnetdet.errors import ShapeError

DTYPE = np.float32


class Padding(str, Enum):
    SAME = "same"
    VALID = "valid"

    @property
    def width(self) -> int:
        return 1 if self is Padding.SAME else 0


def as_tensor(data, shape=None) -> np.ndarray:
    """Coerce ``data`` to a rank-3 float32 tensor.

    ``data`` may already be (C, H, W) or be a flat sequence together with a
    ``shape`` triple in channel-major, row-major order.
    """
    arr = np.asarray(data, dtype=DTYPE)
    if shape is not None:
        shape = tuple(int(s) for s in shape)
        if len(shape) != 3 or min(shape) < 1:
            raise ShapeError(f"tensor shape must be three positive ints, got {shape}")
        if arr.size != shape[0] * shape[1] * shape[2]:
            raise ShapeError(f"{arr.size} values do not fill a {shape} tensor")
        arr = arr.reshape(shape)
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise ShapeError(f"expected a (C, H, W) tensor, got shape {arr.shape}")
    return np.ascontiguousarray(arr)


@dataclass(frozen=True, eq=False)
class ConvKernel:
    """Weights of one 3x3 convolution: ``weight`` is (out, in, 3, 3), ``bias`` is (out,)."""

    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weight, dtype=DTYPE)
        b = np.ascontiguousarray(self.bias, dtype=DTYPE)
        if w.ndim != 4 or w.shape[2:] != (3, 3):
            raise ShapeError(f"kernel must be (out, in, 3, 3), got {w.shape}")
        if b.shape != (w.shape[0],):
            raise ShapeError(f"bias shape {b.shape} does not match {w.shape[0]} output channels")
        w.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    @property
    def out_channels(self) -> int:
        return self.weight.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weight.shape[1]

    @classmethod
    def zeros(cls, out_channels: int, in_channels: int) -> "ConvKernel":
        return cls(np.zeros((out_channels, in_channels, 3, 3), DTYPE), np.zeros(out_channels, DTYPE))
