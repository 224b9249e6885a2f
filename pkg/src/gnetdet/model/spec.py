"""Model architecture description, shape tracing and chip-rule validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

from gnetdet.errors import SpecError
from gnetdet.nn.tensor import Padding

SUPPORTED_INPUT_SIZES = (224, 448)
SUPPORTED_INPUT_CHANNELS = (1, 3)
DETECTION_GRID = 14
BOXES_PER_CELL = 2
DEFAULT_MAX_CHANNELS = 512
DEFAULT_INPUT_SCALE = 1.0 / 255.0
COLOR_MODES = ("y", "rgb", "yuv")


class Activation(str, Enum):
    RELU = "relu"
    NONE = "none"


@dataclass(frozen=True)
class SubLayer:
    """One 3x3 convolution, optionally followed by ReLU."""

    in_channels: int
    out_channels: int
    padding: Padding = Padding.SAME
    activation: Activation = Activation.RELU

    def __post_init__(self):
        if self.in_channels < 1 or self.out_channels < 1:
            raise SpecError(f"sublayer channels must be positive, got {self.in_channels}->{self.out_channels}")
        object.__setattr__(self, "padding", Padding(self.padding))
        object.__setattr__(self, "activation", Activation(self.activation))

    @property
    def params(self) -> int:
        return self.in_channels * self.out_channels * 9 + self.out_channels


@dataclass(frozen=True)
class MajorLayer:
    """A run of sublayers, with optional 2x2 pooling on either side.

    ``pool_before`` exists for layouts that need more downsampling stages
    than there are backbone layers (GnetDet-Small at 448).
    """

    sublayers: tuple[SubLayer, ...]
    pool_after: bool = False
    pool_before: bool = False

    def __post_init__(self):
        subs = tuple(self.sublayers)
        if not subs:
            raise SpecError("a major layer needs at least one sublayer")
        object.__setattr__(self, "sublayers", subs)


@dataclass(frozen=True)
class Detection:
    num_classes: int

    @property
    def output_channels(self) -> int:
        return 5 * BOXES_PER_CELL + self.num_classes


@dataclass(frozen=True)
class ClassifyV1:
    num_classes: int


@dataclass(frozen=True)
class ClassifyV2:
    num_classes: int
    grid: int


HeadKind = Union[Detection, ClassifyV1, ClassifyV2]


@dataclass(frozen=True)
class ModelSpec:
    name: str
    input_size: int
    input_channels: int
    major_layers: tuple[MajorLayer, ...]
    head: HeadKind
    color_mode: str | None = None
    max_channels: int = DEFAULT_MAX_CHANNELS
    input_scale: float = DEFAULT_INPUT_SCALE

    def __post_init__(self):
        layers = tuple(self.major_layers)
        if not layers:
            raise SpecError("a model needs at least one major layer")
        object.__setattr__(self, "major_layers", layers)
        if self.color_mode is None:
            object.__setattr__(self, "color_mode", "y" if self.input_channels == 1 else "rgb")
        elif self.color_mode not in COLOR_MODES:
            raise SpecError(f"color_mode must be one of {COLOR_MODES}, got {self.color_mode!r}")

    def sublayers(self) -> Iterator[SubLayer]:
        for major in self.major_layers:
            yield from major.sublayers

    @property
    def num_sublayers(self) -> int:
        return sum(len(m.sublayers) for m in self.major_layers)

    @property
    def input_shape(self) -> tuple[int, int, int]:
        return (self.input_channels, self.input_size, self.input_size)


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    layer: int | None = None  # major-layer index, None for model-wide rules


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "ok: no violations"
        lines = [f"{len(self.violations)} violation(s):"]
        for v in self.violations:
            where = "model" if v.layer is None else f"major layer {v.layer + 1}"
            lines.append(f"  [{v.rule}] {where}: {v.message}")
        return "\n".join(lines)


def trace_shapes(spec: ModelSpec) -> list[tuple[str, tuple[int, int, int]]]:
    """Shapes after every operation, without touching weights.

    Assumes a consistent channel chain; odd sizes are floored at pools so the
    trace always completes. Returns ``(op, (C, H, W))`` pairs.
    """
    c, h, w = spec.input_shape
    steps = []
    for major in spec.major_layers:
        if major.pool_before:
            h, w = h // 2, w // 2
            steps.append(("pool", (c, h, w)))
        for sub in major.sublayers:
            c = sub.out_channels
            if sub.padding is Padding.VALID:
                h, w = h - 2, w - 2
            steps.append(("conv", (c, h, w)))
        if major.pool_after:
            h, w = h // 2, w // 2
            steps.append(("pool", (c, h, w)))
    return steps


def output_shape(spec: ModelSpec) -> tuple[int, int, int]:
    return trace_shapes(spec)[-1][1]


def param_count(spec: ModelSpec) -> int:
    return sum(sub.params for sub in spec.sublayers())


def v2_capacity(channels: int, grid: int) -> int:
    return channels * grid * grid


def validate(spec: ModelSpec) -> ValidationReport:
    """Check a spec against the chip rules; violations are returned, not raised.

    Rule ids: channel-chain, input-channels, input-size, channel-width,
    odd-pool, spatial-underflow, detection-grid, detection-channels,
    classify-shape, classify-classes, capacity, missing-relu.
    """
    out: list[Violation] = []

    prev = spec.input_channels
    first = True
    for li, major in enumerate(spec.major_layers):
        for sub in major.sublayers:
            if sub.in_channels != prev:
                if first:
                    out.append(Violation("input-channels",
                                         f"first sublayer expects {sub.in_channels} channels but the input has {prev}", li))
                else:
                    out.append(Violation("channel-chain",
                                         f"channel chain broken: {prev} channels feed a sublayer expecting {sub.in_channels}", li))
            prev = sub.out_channels
            first = False

    if spec.input_size not in SUPPORTED_INPUT_SIZES:
        out.append(Violation("input-size", f"input size must be one of {SUPPORTED_INPUT_SIZES}, got {spec.input_size}"))
    if spec.input_channels not in SUPPORTED_INPUT_CHANNELS:
        out.append(Violation("input-channels", f"input must have 1 or 3 channels, got {spec.input_channels}"))
    elif (spec.input_channels == 1) != (spec.color_mode == "y"):
        out.append(Violation("input-channels",
                             f"color mode {spec.color_mode} does not match {spec.input_channels} input channel(s)"))

    for li, major in enumerate(spec.major_layers):
        widest = max(max(s.in_channels, s.out_channels) for s in major.sublayers)
        if widest > spec.max_channels:
            out.append(Violation("channel-width", f"{widest} channels exceed the chip limit of {spec.max_channels}", li))

    h = w = spec.input_size
    underflow = False
    for li, major in enumerate(spec.major_layers):
        if major.pool_before:
            h, w = _pool(h, w, li, out)
        for sub in major.sublayers:
            if sub.padding is Padding.VALID:
                if h < 3 or w < 3:
                    underflow = True
                    break
                h, w = h - 2, w - 2
        if not underflow and major.pool_after:
            h, w = _pool(h, w, li, out)
        if underflow or h < 1 or w < 1:
            out.append(Violation("spatial-underflow", f"feature map cannot shrink below 1x1 (at {h}x{w})", li))
            underflow = True
            break

    last = spec.major_layers[-1].sublayers[-1]
    head = spec.head
    if not underflow:
        if isinstance(head, Detection):
            if (h, w) != (DETECTION_GRID, DETECTION_GRID):
                out.append(Violation("detection-grid", f"detection grid must be 14x14, got {h}x{w}",
                                     len(spec.major_layers) - 1))
            if last.out_channels != head.output_channels:
                out.append(Violation("detection-channels",
                                     f"detection head must emit 10+C = {head.output_channels} channels, got {last.out_channels}",
                                     len(spec.major_layers) - 1))
        elif isinstance(head, ClassifyV1):
            if (h, w) != (1, 1):
                out.append(Violation("classify-shape", f"GnetFC-v1 output must be 1x1, got {h}x{w}",
                                     len(spec.major_layers) - 1))
            if head.num_classes > last.out_channels:
                out.append(Violation("classify-classes",
                                     f"{head.num_classes} classes need as many output channels, got {last.out_channels}",
                                     len(spec.major_layers) - 1))
        elif isinstance(head, ClassifyV2):
            if (h, w) != (head.grid, head.grid):
                out.append(Violation("classify-shape", f"GnetFC-v2 output must be {head.grid}x{head.grid}, got {h}x{w}",
                                     len(spec.major_layers) - 1))
            cap = v2_capacity(last.out_channels, head.grid)
            if head.num_classes > cap:
                out.append(Violation("capacity",
                                     f"{head.num_classes} classes exceed the {last.out_channels}x{head.grid}x{head.grid} "
                                     f"capacity of {cap}", len(spec.major_layers) - 1))
    if head.num_classes < 1:
        out.append(Violation("classify-classes", f"num_classes must be positive, got {head.num_classes}"))

    # every sublayer but the model's final one must carry ReLU
    flat = [(li, k, sub) for li, major in enumerate(spec.major_layers) for k, sub in enumerate(major.sublayers)]
    for li, k, sub in flat[:-1]:
        if sub.activation is not Activation.RELU:
            out.append(Violation("missing-relu", f"backbone sublayer {k + 1} has no ReLU", li))

    return ValidationReport(tuple(out))


def _pool(h, w, li, out):
    if h % 2 or w % 2:
        out.append(Violation("odd-pool", f"2x2 pooling on odd-sized {h}x{w} map", li))
    return h // 2, w // 2


def pools_needed(input_size: int, target: int) -> int:
    ratio = input_size / target
    n = round(math.log2(ratio)) if ratio >= 1 else -1
    if n < 0 or target * 2**n != input_size:
        raise SpecError(f"cannot reach a {target}x{target} map from {input_size}x{input_size} by 2x2 pooling")
    return n
