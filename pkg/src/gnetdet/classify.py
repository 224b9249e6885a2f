"""Reading class scores out of GnetFC-v1 and GnetFC-v2 output tensors.

GnetFC-v2 treats every pixel of a K x G x G map as one class score; class
id ``k*G*G + row*G + col`` lives at (k, row, col). Ids beyond
``num_classes`` are masked out before the softmax.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gnetdet.errors import CapacityError, ShapeError
from gnetdet.nn.ops import softmax


@dataclass(frozen=True, eq=False)
class ClassScores:
    probabilities: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.probabilities.shape[0]

    def argmax(self) -> int:
        return int(np.argmax(self.probabilities))

    def top_k(self, k: int = 5) -> list[tuple[int, float]]:
        """Highest ``k`` classes, probability descending, lower id first on ties."""
        order = np.lexsort((np.arange(self.num_classes), -self.probabilities))[:k]
        return [(int(i), float(self.probabilities[i])) for i in order]


def capacity(channels: int, grid: int) -> int:
    if channels < 1 or grid < 1:
        raise ValueError("channels and grid must be positive")
    return channels * grid * grid


def position_of(class_id: int, grid: int) -> tuple[int, int, int]:
    """(channel, row, col) holding ``class_id`` in a GnetFC-v2 map."""
    ch, rem = divmod(class_id, grid * grid)
    return ch, *divmod(rem, grid)


def decode_v1(output, num_classes: int) -> ClassScores:
    out = np.asarray(output)
    if out.ndim != 3 or out.shape[1:] != (1, 1):
        raise ShapeError(f"GnetFC-v1 output must be K x 1 x 1, got {out.shape}")
    if num_classes < 1 or num_classes > out.shape[0]:
        raise CapacityError(f"{num_classes} classes need at least that many channels, got {out.shape[0]}")
    return ClassScores(softmax(out[:num_classes, 0, 0]))


def decode_v2(output, num_classes: int) -> ClassScores:
    out = np.asarray(output)
    if out.ndim != 3 or out.shape[1] != out.shape[2]:
        raise ShapeError(f"GnetFC-v2 output must be K x G x G, got {out.shape}")
    cap = capacity(out.shape[0], out.shape[1])
    if num_classes < 1 or num_classes > cap:
        raise CapacityError(f"{num_classes} classes exceed the capacity {cap} of a {out.shape} map")
    # C-order flattening of (K, G, G) is exactly the id map
    return ClassScores(softmax(out.reshape(-1)[:num_classes]))


def format_top_k(scores: ClassScores, k: int = 5) -> str:
    return "".join(f"{rank} {cid} {p:.6f}\n" for rank, (cid, p) in enumerate(scores.top_k(k), 1))
