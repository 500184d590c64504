class RggError(Exception):
    """Base class for toolkit errors."""


class TorusRadiusTooLarge(RggError, ValueError):
    """Torus radius or segment length is not below 1/4."""


class KTooLarge(RggError, ValueError):
    pass


class RadiusTooLargeForGrid(RggError, ValueError):
    pass


class NonMonotoneProperty(RggError, ValueError):
    pass


class BracketNotFound(RggError, RuntimeError):
    pass


class InsufficientPoints(RggError, ValueError):
    pass


class PointFileError(RggError, ValueError):
    """Malformed point-set file."""
