"""Canonical GnetDet / GnetFC architectures.

Channel plans are VGG-shaped with the deeper stages capped at 256 to mimic
the on-chip memory limit; every width list can be overridden.
"""

from __future__ import annotations

from typing import Sequence

from gnetdet.errors import CapacityError, SpecError
from gnetdet.model.spec import (
    DETECTION_GRID,
    Activation,
    ClassifyV1,
    ClassifyV2,
    Detection,
    MajorLayer,
    ModelSpec,
    SubLayer,
    pools_needed,
    v2_capacity,
    DEFAULT_MAX_CHANNELS,
)
from gnetdet.nn.tensor import Padding

LARGE_WIDTHS = (64, 128, 256, 256, 256)
LARGE_DEPTHS = (2, 2, 3, 3, 3)
SMALL_WIDTHS = (64, 128, 256, 256)
SMALL_DEPTHS = (1, 2, 2, 3)
VGG_WIDTHS = (64, 128, 256, 512, 512)
VGG_DEPTHS = (2, 2, 3, 3, 3)


def _mode_tag(input_channels, color_mode):
    return color_mode or ("y" if input_channels == 1 else "rgb")


def _backbone(in_ch, widths, depths, n_pools):
    if len(widths) != len(depths):
        raise SpecError("widths and depths must have the same length")
    if n_pools > len(widths):
        raise SpecError(f"{n_pools} pooling stages needed but the backbone has only {len(widths)} major layers")
    layers = []
    for i, (width, depth) in enumerate(zip(widths, depths)):
        subs = []
        for _ in range(depth):
            subs.append(SubLayer(in_ch, width))
            in_ch = width
        layers.append(MajorLayer(tuple(subs), pool_after=i < n_pools))
    return layers, in_ch


def _head(in_ch, widths, padding=Padding.SAME, head_relu=False, pool_before=False):
    subs = []
    for k, width in enumerate(widths):
        last = k == len(widths) - 1
        act = Activation.RELU if (not last or head_relu) else Activation.NONE
        subs.append(SubLayer(in_ch, width, padding, act))
        in_ch = width
    return MajorLayer(tuple(subs), pool_before=pool_before)


def _check_sizes(input_size, input_channels, num_classes):
    if input_size not in (224, 448):
        raise SpecError(f"input size must be 224 or 448, got {input_size}")
    if input_channels not in (1, 3):
        raise SpecError(f"input channels must be 1 or 3, got {input_channels}")
    if num_classes < 1:
        raise SpecError(f"num_classes must be >= 1, got {num_classes}")


def build_gnetdet_large(input_size: int = 224, input_channels: int = 1, num_classes: int = 20, *,
                        widths: Sequence[int] = LARGE_WIDTHS, depths: Sequence[int] = LARGE_DEPTHS,
                        head_widths: Sequence[int] = (256, 256), head_relu: bool = False,
                        color_mode: str | None = None, max_channels: int = DEFAULT_MAX_CHANNELS,
                        name: str | None = None) -> ModelSpec:
    """Five backbone major layers plus a detection-head major layer.

    Pools follow the first ``log2(input_size / 14)`` backbone layers, so 224
    inputs get four and 448 inputs five.
    """
    _check_sizes(input_size, input_channels, num_classes)
    head = Detection(num_classes)
    layers, ch = _backbone(input_channels, widths, depths, pools_needed(input_size, DETECTION_GRID))
    layers.append(_head(ch, tuple(head_widths) + (head.output_channels,), head_relu=head_relu))
    tag = _mode_tag(input_channels, color_mode)
    return ModelSpec(name or f"gnetdet-large-{input_size}-{tag}-{num_classes}", input_size, input_channels,
                     tuple(layers), head, color_mode, max_channels)


def build_gnetdet_small(input_size: int = 224, input_channels: int = 1, num_classes: int = 20, *,
                        widths: Sequence[int] = SMALL_WIDTHS, depths: Sequence[int] = SMALL_DEPTHS,
                        head_widths: Sequence[int] = (256,) * 5, head_relu: bool = False,
                        color_mode: str | None = None, max_channels: int = DEFAULT_MAX_CHANNELS,
                        name: str | None = None) -> ModelSpec:
    """Four backbone major layers and a merged six-sublayer head.

    At 448 the fifth halving happens on entry to the head (``pool_before``),
    since four backbone layers can only host four pools.
    """
    _check_sizes(input_size, input_channels, num_classes)
    head = Detection(num_classes)
    n_pools = pools_needed(input_size, DETECTION_GRID)
    extra = max(0, n_pools - len(widths))
    layers, ch = _backbone(input_channels, widths, depths, n_pools - extra)
    if extra > 1:
        raise SpecError(f"{n_pools} pooling stages do not fit {len(widths)} backbone layers")
    layers.append(_head(ch, tuple(head_widths) + (head.output_channels,), head_relu=head_relu,
                        pool_before=bool(extra)))
    tag = _mode_tag(input_channels, color_mode)
    return ModelSpec(name or f"gnetdet-small-{input_size}-{tag}-{num_classes}", input_size, input_channels,
                     tuple(layers), head, color_mode, max_channels)


def build_gnetfc_v1(num_classes: int, backbone_channels: Sequence[int] = VGG_WIDTHS, *,
                    depths: Sequence[int] = VGG_DEPTHS, input_size: int = 224, input_channels: int = 3,
                    head_relu: bool = False, color_mode: str | None = None,
                    max_channels: int = DEFAULT_MAX_CHANNELS, name: str | None = None) -> ModelSpec:
    """Backbone down to 7x7, then three valid convolutions 7 -> 5 -> 3 -> 1.

    The final 1x1 map carries one channel per class.
    """
    if num_classes > max_channels:
        raise CapacityError(f"{num_classes} classes exceed the {max_channels}-channel limit of GnetFC-v1")
    _check_sizes(input_size, input_channels, num_classes)
    layers, ch = _backbone(input_channels, backbone_channels, depths, pools_needed(input_size, 7))
    layers.append(_head(ch, (ch, ch, num_classes), Padding.VALID, head_relu=head_relu))
    tag = _mode_tag(input_channels, color_mode)
    return ModelSpec(name or f"gnetfc-v1-{input_size}-{tag}-{num_classes}", input_size, input_channels,
                     tuple(layers), ClassifyV1(num_classes), color_mode, max_channels)


def build_gnetfc_v2(num_classes: int, grid: int = 7, channels: int = 256, *,
                    backbone_channels: Sequence[int] = LARGE_WIDTHS, depths: Sequence[int] = LARGE_DEPTHS,
                    input_size: int = 224, input_channels: int = 3, head_relu: bool = False,
                    color_mode: str | None = None, max_channels: int = DEFAULT_MAX_CHANNELS,
                    name: str | None = None) -> ModelSpec:
    """Backbone down to ``grid`` x ``grid`` and a same-padded head of ``channels``
    maps whose every pixel is one class score."""
    if grid not in (7, 14):
        raise SpecError(f"GnetFC-v2 grid must be 7 or 14, got {grid}")
    if channels > max_channels:
        raise CapacityError(f"{channels} head channels exceed the chip limit of {max_channels}")
    cap = v2_capacity(channels, grid)
    if num_classes > cap:
        raise CapacityError(f"{num_classes} classes exceed the {channels}x{grid}x{grid} capacity of {cap}")
    _check_sizes(input_size, input_channels, num_classes)
    layers, ch = _backbone(input_channels, backbone_channels, depths, pools_needed(input_size, grid))
    layers.append(_head(ch, (channels, channels), head_relu=head_relu))
    tag = _mode_tag(input_channels, color_mode)
    return ModelSpec(name or f"gnetfc-v2-{input_size}-{tag}-{num_classes}", input_size, input_channels,
                     tuple(layers), ClassifyV2(num_classes, grid), color_mode, max_channels)


BUILDERS = {
    "gnetdet-large": build_gnetdet_large,
    "gnetdet-small": build_gnetdet_small,
    "gnetfc-v1": build_gnetfc_v1,
    "gnetfc-v2": build_gnetfc_v2,
}
