"""Forward-pass executor."""

import numpy as np

from gnetdet.errors import ShapeError, SpecError
from gnetdet.model.spec import Activation, ModelSpec, validate
from gnetdet.model.weights import WeightStore
from gnetdet.nn import ops
from gnetdet.nn.tensor import as_tensor


def forward(spec: ModelSpec, weights: WeightStore, x, *, parallel: bool = False, check: bool = True) -> np.ndarray:
    """Run every sublayer and pool of ``spec`` on ``x`` in order.

    ``check=False`` skips spec validation, for callers (like the benchmark
    loop) that already validated once.
    """
    if check:
        report = validate(spec)
        if not report.ok:
            raise SpecError(f"model spec is invalid:\n{report}")
    weights.check(spec)
    x = as_tensor(x)
    if x.shape != spec.input_shape:
        raise ShapeError(f"input shape {x.shape} does not match model input {spec.input_shape}")
    kernels = iter(weights)
    for major in spec.major_layers:
        if major.pool_before:
            x = ops.maxpool2x2(x, parallel=parallel)
        for sub in major.sublayers:
            x = ops.conv3x3(x, next(kernels), sub.padding, parallel=parallel)
            if sub.activation is Activation.RELU:
                x = ops.relu(x)
        if major.pool_after:
            x = ops.maxpool2x2(x, parallel=parallel)
    return x
