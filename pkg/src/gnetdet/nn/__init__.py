from gnetdet.nn.ops import conv3x3, maxpool2x2, relu, softmax
from gnetdet.nn.tensor import DTYPE, ConvKernel, Padding, as_tensor

__all__ = ["DTYPE", "ConvKernel", "Padding", "as_tensor", "conv3x3", "maxpool2x2", "relu", "softmax"]
