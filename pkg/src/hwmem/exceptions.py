"""Exception types shared across the library.

Everything raised on bad input derives from ValueError as well, so callers
that only know about the standard hierarchy still catch what they expect.
"""


class HwmemError(Exception):
    """Base class for all hwmem-specific errors."""


class ZeroVectorError(HwmemError, ValueError):
    """A vector that must be nonzero has Euclidean norm zero."""


class DimensionMismatchError(HwmemError, ValueError):
    """Vector or matrix dimensions do not line up."""


class EmptyModuleError(HwmemError, ValueError):
    """A module holding no templates was queried."""


class EmptySignatureError(HwmemError, ValueError):
    """classify() was handed a zero-length signature."""


class EmptyLayerError(HwmemError, ValueError):
    """A layer holding no modules was asked for a signature."""


class EmptyStreamError(HwmemError, ValueError):
    """A training stream contained no samples."""


class RawUnavailableError(HwmemError, RuntimeError):
    """Operation needs retained raw templates, but the module dropped them."""


class DimensionExhaustedError(HwmemError, RuntimeError):
    """A projection already spans the full space and cannot be extended."""


class InvalidEpsError(HwmemError, ValueError):
    """Distortion parameter outside (0, 1)."""


class InvalidParamsError(HwmemError, ValueError):
    """Generator or module parameters outside their valid range."""


class UnknownModuleError(HwmemError, KeyError):
    """An episode referenced a module id that does not exist."""


class NotStudiedError(HwmemError, RuntimeError):
    """recall() called before any episode was studied."""


class DegenerateLabelsError(HwmemError, ValueError):
    """Threshold calibration needs at least one positive and one negative."""


class ConfigError(HwmemError, ValueError):
    """Experiment configuration failed validation."""


class SnapshotError(HwmemError):
    """Base class for model snapshot I/O failures."""


class VersionError(SnapshotError):
    """Snapshot was written by an unknown (future) format version."""


class CorruptSnapshotError(SnapshotError):
    """Snapshot failed its structural or checksum validation."""
