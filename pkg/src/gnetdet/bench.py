"""Stage-resolved timing of the detection pipeline.

The accelerator pipeline splits into host preprocessing plus tensor
hand-off (stands in for the USB "I/O" stage), the on-chip forward pass, and
the host-side decode + NMS. Each stage is timed separately with
``time.perf_counter_ns``.
"""

from __future__ import annotations

import contextlib
import time
from dataclasses import dataclass, fields
from typing import Sequence

from gnetdet._backend import BACKEND, USE_NUMBA
from gnetdet.detect import DecodeConfig, decode, nms
from gnetdet.errors import FormatError, SpecError
from gnetdet.io.image import Image, preprocess
from gnetdet.model import ModelSpec, WeightStore, forward, validate

STAGES = ("preprocess", "forward", "decode", "nms")


@dataclass(frozen=True)
class StageTimings:
    preprocess_ns: int
    forward_ns: int
    decode_ns: int
    nms_ns: int
    total_ns: int
    frames: int
    mode: str = "single"
    backend: str = BACKEND
    timer_resolution_ns: float = 0.0

    @property
    def stage_sum_ns(self) -> int:
        return self.preprocess_ns + self.forward_ns + self.decode_ns + self.nms_ns

    @property
    def host_post_ns(self) -> int:
        return self.decode_ns + self.nms_ns

    @property
    def fps(self) -> float:
        """Frames per second over the whole pipeline."""
        return self.frames / (self.total_ns * 1e-9) if self.total_ns > 0 else 0.0

    @property
    def fps_excl_post(self) -> float:
        """Frames per second with decode + NMS left out."""
        t = self.total_ns - self.host_post_ns
        return self.frames / (t * 1e-9) if t > 0 else 0.0

    def share(self, ns: int) -> float:
        return 100.0 * ns / self.total_ns if self.total_ns > 0 else 0.0


def _timer_resolution_ns() -> float:
    return time.get_clock_info("perf_counter").resolution * 1e9


@contextlib.contextmanager
def _thread_limits(parallel: bool):
    if parallel:
        yield
        return
    with contextlib.ExitStack() as stack:
        try:
            from threadpoolctl import threadpool_limits

            stack.enter_context(threadpool_limits(limits=1))
        except ImportError:  # pragma: no cover
            pass
        if USE_NUMBA:
            import numba

            prev = numba.get_num_threads()
            numba.set_num_threads(1)
            stack.callback(numba.set_num_threads, prev)
        yield


def run_benchmark(spec: ModelSpec, weights: WeightStore, images: Sequence[Image],
                  cfg: DecodeConfig = DecodeConfig(), warmup: int = 1, iterations: int = 10, *,
                  parallel: bool = False, outputs: list | None = None) -> StageTimings:
    """Time ``iterations`` frames, cycling through ``images``.

    Warmup frames run the same pipeline untimed. Detections for each image
    must be identical on every pass, otherwise RuntimeError is raised. When
    ``outputs`` is a list it receives the per-image detections.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if warmup < 0:
        raise ValueError("warmup must be >= 0")
    if not images:
        raise ValueError("at least one image is required")
    report = validate(spec)
    if not report.ok:
        raise SpecError(f"model spec is invalid:\n{report}")
    weights.check(spec)

    def frame(img):
        x = preprocess(img, spec.input_size, spec.color_mode, spec.input_scale)
        t1 = time.perf_counter_ns()
        y = forward(spec, weights, x, parallel=parallel, check=False)
        t2 = time.perf_counter_ns()
        boxes = decode(y, img.width, img.height, cfg)
        t3 = time.perf_counter_ns()
        kept = nms(boxes, cfg.nms_iou_threshold)
        t4 = time.perf_counter_ns()
        return kept, t1, t2, t3, t4

    seen: dict[int, list] = {}

    def check(i, kept):
        if i in seen:
            if seen[i] != kept:
                raise RuntimeError(f"detections for image {i} changed between passes")
        else:
            seen[i] = kept

    acc = dict.fromkeys(STAGES, 0)
    with _thread_limits(parallel):
        for k in range(warmup):
            check(k % len(images), frame(images[k % len(images)])[0])
        start = time.perf_counter_ns()
        for k in range(iterations):
            i = k % len(images)
            t0 = time.perf_counter_ns()
            kept, t1, t2, t3, t4 = frame(images[i])
            acc["preprocess"] += t1 - t0
            acc["forward"] += t2 - t1
            acc["decode"] += t3 - t2
            acc["nms"] += t4 - t3
            check(i, kept)
        total = time.perf_counter_ns() - start

    if outputs is not None:
        outputs[:] = [seen[i] for i in sorted(seen)]
    return StageTimings(acc["preprocess"], acc["forward"], acc["decode"], acc["nms"], total, iterations,
                        "parallel" if parallel else "single", BACKEND, _timer_resolution_ns())


def report(t: StageTimings, fmt: str = "text") -> str:
    if fmt in ("kv", "machine"):
        return _report_kv(t)
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [
        f"# timer perf_counter_ns, resolution {t.timer_resolution_ns:g} ns; mode {t.mode}; backend {t.backend}",
        f"{'stage':<12}{'total ms':>12}{'ms/frame':>12}{'share':>9}",
    ]
    rows = [(name, getattr(t, f"{name}_ns")) for name in STAGES]
    rows.append(("other", max(0, t.total_ns - t.stage_sum_ns)))
    for name, ns in rows:
        lines.append(f"{name:<12}{ns / 1e6:>12.3f}{ns / 1e6 / t.frames:>12.3f}{t.share(ns):>8.1f}%")
    lines.append(f"{'total':<12}{t.total_ns / 1e6:>12.3f}{t.total_ns / 1e6 / t.frames:>12.3f}{t.share(t.total_ns):>8.1f}%")
    lines.append(f"frames {t.frames}")
    lines.append(f"host decode+nms share {t.share(t.host_post_ns):.1f}%")
    lines.append(f"fps {t.fps:.2f} (all stages), {t.fps_excl_post:.2f} (excluding decode+nms)")
    return "\n".join(lines) + "\n"


def _report_kv(t: StageTimings) -> str:
    out = []
    for f in fields(t):
        v = getattr(t, f.name)
        out.append(f"{f.name}={v!r}" if isinstance(v, float) else f"{f.name}={v}")
    out += [
        f"host_post_ns={t.host_post_ns}",
        f"host_post_share={t.share(t.host_post_ns)!r}",
        f"forward_share={t.share(t.forward_ns)!r}",
        f"fps={t.fps!r}",
        f"fps_excl_post={t.fps_excl_post!r}",
    ]
    return "\n".join(out) + "\n"


def parse_report(text: str) -> StageTimings:
    """Inverse of ``report(t, "kv")``; derived keys are ignored."""
    kv = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"report line is not key=value: {line!r}")
        kv[key.strip()] = value.strip()
    args = {}
    for f in fields(StageTimings):
        if f.name not in kv:
            raise FormatError(f"report is missing {f.name}")
        raw = kv[f.name]
        if f.type == "int":
            args[f.name] = int(raw)
        elif f.type == "float":
            args[f.name] = float(raw)
        else:
            args[f.name] = raw
    return StageTimings(**args)
