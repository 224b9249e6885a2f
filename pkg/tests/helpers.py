"""Shared fixtures-by-function for CLI and acceptance tests."""

import numpy as np

from gnetdet.io.image import Image
from gnetdet.model import WeightStore, build_gnetdet_small
from gnetdet.nn import ConvKernel


def tiny_detector(num_classes=20):
    """GnetDet-Small layout with one-channel backbone, cheap enough for CLI tests."""
    return build_gnetdet_small(224, 1, num_classes, widths=(1, 1, 1, 1), depths=(1, 1, 1, 1),
                               head_widths=(1,) * 5, name="tiny")


def single_cell_weights(spec):
    """Identity backbone plus a head that writes a fixed box into every lit cell.

    With a 16x16 white patch in the top-left corner of a black 224x224 image,
    only cell (0, 0) sees 1.0 after four 2x2 pools; the head then emits
    box 1 = (0.5, 0.5, 1/14, 1/14), confidence 1 and a class-0 logit of 10.
    """
    kernels = []
    subs = list(spec.sublayers())
    for sub in subs[:-1]:
        w = np.zeros((sub.out_channels, sub.in_channels, 3, 3), np.float32)
        w[0, 0, 1, 1] = 1.0
        kernels.append(ConvKernel(w, np.zeros(sub.out_channels, np.float32)))
    last = subs[-1]
    w = np.zeros((last.out_channels, last.in_channels, 3, 3), np.float32)
    w[0:4, 0, 1, 1] = (0.5, 0.5, 1 / 14, 1 / 14)
    w[8, 0, 1, 1] = 1.0
    w[10, 0, 1, 1] = 10.0
    kernels.append(ConvKernel(w, np.zeros(last.out_channels, np.float32)))
    return WeightStore(tuple(kernels))


def corner_patch_image():
    px = np.zeros((224, 224, 1), np.uint8)
    px[:16, :16] = 255
    return Image(px)
