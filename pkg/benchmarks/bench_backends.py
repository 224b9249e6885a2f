"""Compare the numba kernels against the pure-numpy fallback.

Times patch extraction + GEMM convolution, 2x2 max pooling, greedy NMS and a
full GnetDet-Large forward pass on each backend, and checks that both
backends produce the same numbers. Run with ``python3 benchmarks/bench_backends.py``.
"""

import argparse
import contextlib
import statistics
import time

import numpy as np

from gnetdet import kernels
from gnetdet.model import WeightStore, build_gnetdet_large, forward


@contextlib.contextmanager
def use_backend(mod):
    saved = kernels.conv3x3, kernels.maxpool2x2, kernels.nms_keep
    kernels.conv3x3, kernels.maxpool2x2, kernels.nms_keep = mod.conv3x3, mod.maxpool2x2, mod.nms_keep
    try:
        yield
    finally:
        kernels.conv3x3, kernels.maxpool2x2, kernels.nms_keep = saved


def best_of(fn, repeat):
    fn()  # warm-up, also triggers JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def nms_inputs(rng, n, classes):
    x1, y1 = rng.uniform(0, 400, (2, n))
    w, h = rng.uniform(5, 120, (2, n))
    order = np.argsort(-rng.uniform(size=n), kind="stable")
    cols = [a[order].astype(np.float64) for a in (x1, y1, x1 + w, y1 + h)]
    return (*cols, rng.integers(0, classes, n)[order].astype(np.int64), 0.45)


def cases(rng):
    x = rng.standard_normal((128, 56, 56)).astype(np.float32)
    wt = (rng.standard_normal((128, 128, 3, 3)) * 0.05).astype(np.float32)
    b = rng.standard_normal(128).astype(np.float32)
    pool_in = rng.standard_normal((64, 224, 224)).astype(np.float32)
    boxes = nms_inputs(rng, 2000, 20)
    spec = build_gnetdet_large(224, 1, 20)
    weights = WeightStore.random(spec, seed=0)
    img = rng.uniform(0, 1, spec.input_shape).astype(np.float32)
    return [
        ("conv3x3 128->128 @56", lambda m: m.conv3x3(x, wt, b, 1)),
        ("maxpool2x2 64x224x224", lambda m: m.maxpool2x2(pool_in)),
        ("nms_keep 2000 boxes", lambda m: m.nms_keep(*boxes)),
        ("forward large-224-y", lambda m: _forward(m, spec, weights, img)),
    ]


def _forward(mod, spec, weights, img):
    with use_backend(mod):
        return forward(spec, weights, img)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    numpy_mod = kernels.get_impl("numpy")
    try:
        numba_mod = kernels.get_impl("numba")
    except ImportError:
        print("numba is not installed; only the numpy backend is available")
        return 1

    rng = np.random.default_rng(args.seed)
    print(f"{'case':24s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}  equal")
    for name, fn in cases(rng):
        a, b = fn(numpy_mod), fn(numba_mod)
        equal = np.array_equal(a, b)
        t_np, _ = best_of(lambda: fn(numpy_mod), args.repeat)
        t_nb, _ = best_of(lambda: fn(numba_mod), args.repeat)
        print(f"{name:24s} {t_np * 1e3:10.2f} {t_nb * 1e3:10.2f} {t_np / t_nb:8.2f}x  {equal}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
