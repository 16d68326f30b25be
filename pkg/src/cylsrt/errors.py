"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid parameter, geometry, or container contents."""


class FileFormatError(Exception):
    """Base class for problems with the SRTVOL/SRTDAT on-disk formats."""


class HeaderError(FileFormatError):
    """Magic tag, version, or header line cannot be parsed."""


class TruncationError(FileFormatError):
    """Binary payload is shorter than the header promises."""


class NonFiniteError(FileFormatError):
    """Payload contains NaN or infinity."""
