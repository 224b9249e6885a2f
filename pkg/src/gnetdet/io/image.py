"""8-bit images: binary PPM/PGM codecs, BT.601 YUV, resizing and box drawing."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from gnetdet.errors import FormatError
from gnetdet.model.spec import DEFAULT_INPUT_SCALE

_WHITESPACE = b" \t\r\n\v\f"


class ChannelMode(str, Enum):
    RGB = "rgb"
    YUV = "yuv"
    Y = "y"

    @property
    def channels(self) -> int:
        return 1 if self is ChannelMode.Y else 3


@dataclass(frozen=True, eq=False)
class Image:
    """Interleaved 8-bit pixels, ``pixels.shape == (height, width, channels)``."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[2] not in (1, 3) or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"image pixels must be (H, W, 1|3), got {px.shape}")
        if px.dtype != np.uint8:
            raise ValueError(f"image pixels must be uint8, got {px.dtype}")
        object.__setattr__(self, "pixels", np.ascontiguousarray(px))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def __eq__(self, other):
        return isinstance(other, Image) and np.array_equal(self.pixels, other.pixels)


def _header_tokens(data: bytes, count: int):
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError("truncated image header")
        tokens.append(data[start:pos])
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise FormatError("image header must end with a single whitespace byte")
    return tokens, pos + 1


def decode_pnm(data: bytes) -> Image:
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise FormatError(f"unsupported image magic {magic!r}; only binary P5/P6 are read")
    (w, h, maxval), pos = _header_tokens(data[2:], 3)
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise FormatError(f"non-numeric image header field: {exc}") from exc
    if width < 1 or height < 1:
        raise FormatError(f"bad image size {width}x{height}")
    if maxval != 255:
        raise FormatError(f"only 8-bit images (max value 255) are supported, got {maxval}")
    start = 2 + pos
    need = width * height * channels
    payload = data[start:start + need]
    if len(payload) < need:
        raise FormatError(f"image payload truncated: {len(payload)} of {need} bytes")
    return Image(np.frombuffer(payload, np.uint8).reshape(height, width, channels).copy())


def encode_pnm(image: Image) -> bytes:
    magic = b"P5" if image.channels == 1 else b"P6"
    return magic + f"\n{image.width} {image.height}\n255\n".encode("ascii") + image.pixels.tobytes()


def load_image(path) -> Image:
    return decode_pnm(Path(path).read_bytes())


def save_image(image: Image, path) -> None:
    Path(path).write_bytes(encode_pnm(image))


def _round_u8(x):
    return np.clip(np.floor(x + 0.5), 0, 255).astype(np.uint8)


def _luma(px):
    rgb = px.astype(np.float64)
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def rgb_to_yuv(image: Image) -> Image:
    """BT.601 full range; U and V are offset by 128."""
    if image.channels != 3:
        raise ValueError("rgb_to_yuv needs a 3-channel image")
    rgb = image.pixels.astype(np.float64)
    y = _luma(image.pixels)
    u = 0.492 * (rgb[..., 2] - y) + 128.0
    v = 0.877 * (rgb[..., 0] - y) + 128.0
    return Image(np.stack([_round_u8(y), _round_u8(u), _round_u8(v)], axis=-1))


def extract_y(image: Image) -> Image:
    """Y plane of an RGB image (1-channel images pass through)."""
    if image.channels == 1:
        return image
    return Image(_round_u8(_luma(image.pixels))[:, :, None])


def to_mode(image: Image, mode: ChannelMode) -> Image:
    mode = ChannelMode(mode)
    if mode is ChannelMode.Y:
        return extract_y(image)
    if image.channels == 1:
        image = Image(np.repeat(image.pixels, 3, axis=2))
    return rgb_to_yuv(image) if mode is ChannelMode.YUV else image


def _axis_weights(n_in: int, n_out: int):
    # half-pixel centres, edge-clamped
    src = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    i0 = np.floor(src).astype(np.intp)
    i1 = np.minimum(i0 + 1, n_in - 1)
    return i0, i1, src - i0


def resize_bilinear(planes: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize a (C, H, W) float array."""
    _, h, w = planes.shape
    r0, r1, fr = _axis_weights(h, out_h)
    c0, c1, fc = _axis_weights(w, out_w)
    top, bottom = planes[:, r0, :], planes[:, r1, :]
    rows = top + fr[None, :, None] * (bottom - top)
    left, right = rows[:, :, c0], rows[:, :, c1]
    return left + fc[None, None, :] * (right - left)


def preprocess(image: Image, target: int = 224, mode: ChannelMode = ChannelMode.Y,
               scale: float = DEFAULT_INPUT_SCALE) -> np.ndarray:
    """Colour-convert, bilinearly resize to ``target`` x ``target`` and scale
    samples (by 1/255 by default) into a float32 (C, H, W) tensor."""
    converted = to_mode(image, mode)
    planes = converted.pixels.transpose(2, 0, 1).astype(np.float64)
    if planes.shape[1:] != (target, target):
        planes = resize_bilinear(planes, target, target)
    return np.ascontiguousarray(planes * scale, dtype=np.float32)


PALETTE = np.array([
    (230, 25, 75), (60, 180, 75), (255, 225, 25), (0, 130, 200), (245, 130, 48),
    (145, 30, 180), (70, 240, 240), (240, 50, 230), (210, 245, 60), (250, 190, 212),
    (0, 128, 128), (220, 190, 255), (170, 110, 40), (255, 250, 200), (128, 0, 0),
    (170, 255, 195), (128, 128, 0), (255, 215, 180), (0, 0, 128), (128, 128, 128),
], dtype=np.uint8)

LINE_WIDTH = 2


def box_pixel_bounds(box, width: int, height: int):
    """Inclusive pixel rectangle covered by ``box``, clamped; None if empty."""
    left = max(0, int(np.floor(box.x1)))
    top = max(0, int(np.floor(box.y1)))
    right = min(width - 1, int(np.ceil(box.x2)) - 1)
    bottom = min(height - 1, int(np.ceil(box.y2)) - 1)
    if right < left or bottom < top:
        return None
    return left, top, right, bottom


def draw_boxes(image: Image, boxes: Sequence) -> Image:
    """Copy of ``image`` with a 2-pixel outline per box, coloured by class."""
    if image.channels != 3:
        raise ValueError("draw_boxes needs a 3-channel image")
    px = image.pixels.copy()
    for box in boxes:
        bounds = box_pixel_bounds(box, image.width, image.height)
        if bounds is None:
            continue
        left, top, right, bottom = bounds
        color = PALETTE[box.class_id % len(PALETTE)]
        lw = LINE_WIDTH
        px[top:min(top + lw, bottom + 1), left:right + 1] = color
        px[max(bottom - lw + 1, top):bottom + 1, left:right + 1] = color
        px[top:bottom + 1, left:min(left + lw, right + 1)] = color
        px[top:bottom + 1, max(right - lw + 1, left):right + 1] = color
    return Image(px)
