"""Per-sublayer weights and the ``GNW1`` binary weight file.

File layout (little-endian)::

    b"GNW1"                      magic
    u64                          spec fingerprint
    repeated per sublayer:
        u32 out, u32 in
        f32[out*in*9]            kernel, out-major / in-major / row-major
        f32[out]                 bias
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gnetdet.errors import FingerprintError, FormatError, ShapeError
from gnetdet.model.config import fingerprint
from gnetdet.model.spec import ModelSpec
from gnetdet.nn.tensor import DTYPE, ConvKernel

MAGIC = b"GNW1"
_HEADER = struct.Struct("<4sQ")
_RECORD = struct.Struct("<II")
_F32 = np.dtype("<f4")


@dataclass(frozen=True, eq=False)
class WeightStore:
    kernels: tuple[ConvKernel, ...]

    def __post_init__(self):
        object.__setattr__(self, "kernels", tuple(self.kernels))

    def __len__(self):
        return len(self.kernels)

    def __iter__(self):
        return iter(self.kernels)

    def check(self, spec: ModelSpec) -> None:
        """Raise ShapeError unless count and shapes follow the spec's sublayers."""
        subs = list(spec.sublayers())
        if len(subs) != len(self.kernels):
            raise ShapeError(f"spec has {len(subs)} sublayers but {len(self.kernels)} kernels were given")
        for i, (sub, k) in enumerate(zip(subs, self.kernels)):
            if (k.out_channels, k.in_channels) != (sub.out_channels, sub.in_channels):
                raise ShapeError(f"kernel {i} is {k.in_channels}->{k.out_channels}, "
                                 f"spec wants {sub.in_channels}->{sub.out_channels}")

    @classmethod
    def zeros(cls, spec: ModelSpec) -> "WeightStore":
        return cls(tuple(ConvKernel.zeros(s.out_channels, s.in_channels) for s in spec.sublayers()))

    @classmethod
    def random(cls, spec: ModelSpec, seed: int = 0) -> "WeightStore":
        """Uniform in [-s, s] with s = sqrt(1 / (9 * in_channels)), kernel and bias alike."""
        rng = np.random.default_rng(seed)
        kernels = []
        for sub in spec.sublayers():
            s = np.sqrt(1.0 / (9 * sub.in_channels))
            w = rng.uniform(-s, s, size=(sub.out_channels, sub.in_channels, 3, 3)).astype(DTYPE)
            b = rng.uniform(-s, s, size=sub.out_channels).astype(DTYPE)
            kernels.append(ConvKernel(w, b))
        return cls(tuple(kernels))


def weights_to_bytes(spec: ModelSpec, weights: WeightStore) -> bytes:
    weights.check(spec)
    parts = [_HEADER.pack(MAGIC, fingerprint(spec))]
    for k in weights:
        parts.append(_RECORD.pack(k.out_channels, k.in_channels))
        parts.append(k.weight.astype(_F32).tobytes(order="C"))
        parts.append(k.bias.astype(_F32).tobytes(order="C"))
    return b"".join(parts)


def weights_from_bytes(spec: ModelSpec, data: bytes) -> WeightStore:
    if len(data) < _HEADER.size:
        raise FormatError("weight file is shorter than its header")
    magic, fp = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"bad weight file magic {magic!r}")
    expected = fingerprint(spec)
    if fp != expected:
        raise FingerprintError(f"weight file fingerprint {fp:016x} does not match model {expected:016x}")
    pos = _HEADER.size
    kernels = []
    for i, sub in enumerate(spec.sublayers()):
        if pos + _RECORD.size > len(data):
            raise FormatError(f"weight file truncated before sublayer {i}")
        out_ch, in_ch = _RECORD.unpack_from(data, pos)
        pos += _RECORD.size
        if (out_ch, in_ch) != (sub.out_channels, sub.in_channels):
            raise FormatError(f"sublayer {i} record is {in_ch}->{out_ch}, spec wants "
                              f"{sub.in_channels}->{sub.out_channels}")
        n_w, n_b = out_ch * in_ch * 9, out_ch
        end = pos + 4 * (n_w + n_b)
        if end > len(data):
            raise FormatError(f"weight file truncated inside sublayer {i}")
        w = np.frombuffer(data, _F32, n_w, pos).reshape(out_ch, in_ch, 3, 3)
        b = np.frombuffer(data, _F32, n_b, pos + 4 * n_w)
        kernels.append(ConvKernel(w.astype(DTYPE), b.astype(DTYPE)))
        pos = end
    if pos != len(data):
        raise FormatError(f"{len(data) - pos} trailing bytes after the last sublayer")
    return WeightStore(tuple(kernels))


def save_weights(spec: ModelSpec, weights: WeightStore, path) -> None:
    Path(path).write_bytes(weights_to_bytes(spec, weights))


def load_weights(spec: ModelSpec, path) -> WeightStore:
    return weights_from_bytes(spec, Path(path).read_bytes())
