"""Exception types shared across the package."""


class GnetError(Exception):
    """Base class for all package errors."""


class ShapeError(GnetError, ValueError):
    """Tensor, kernel or weight shapes are inconsistent."""


class CapacityError(GnetError, ValueError):
    """A requested class count or channel width exceeds what the chip can hold."""


class FormatError(GnetError, ValueError):
    """A file or text record could not be parsed."""


class FingerprintError(FormatError):
    """A weight file was produced for a different model spec."""


class SpecError(GnetError, ValueError):
    """A model spec is malformed or fails validation where a valid one is required."""
