"""CPU runtime for GnetDet / GnetFC models restricted to the accelerator
operator set (3x3 convolution, ReLU, 2x2 max pooling)."""

from gnetdet._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
