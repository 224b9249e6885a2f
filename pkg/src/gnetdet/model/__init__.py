from gnetdet.model.builders import (
    BUILDERS,
    build_gnetdet_large,
    build_gnetdet_small,
    build_gnetfc_v1,
    build_gnetfc_v2,
)
from gnetdet.model.config import fingerprint, load_spec, save_spec, spec_from_text, spec_to_text
from gnetdet.model.forward import forward
from gnetdet.model.spec import (
    Activation,
    ClassifyV1,
    ClassifyV2,
    Detection,
    MajorLayer,
    ModelSpec,
    SubLayer,
    ValidationReport,
    Violation,
    output_shape,
    param_count,
    trace_shapes,
    validate,
)
from gnetdet.model.weights import WeightStore, load_weights, save_weights, weights_from_bytes, weights_to_bytes

__all__ = [
    "BUILDERS", "build_gnetdet_large", "build_gnetdet_small", "build_gnetfc_v1", "build_gnetfc_v2",
    "fingerprint", "load_spec", "save_spec", "spec_from_text", "spec_to_text", "forward",
    "Activation", "ClassifyV1", "ClassifyV2", "Detection", "MajorLayer", "ModelSpec", "SubLayer",
    "ValidationReport", "Violation", "output_shape", "param_count", "trace_shapes", "validate",
    "WeightStore", "load_weights", "save_weights", "weights_from_bytes", "weights_to_bytes",
]
