"""Exception types shared across the library."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class UnreadableFileError(OSError):
    """The input file does not exist or cannot be opened."""


class UnsupportedEncodingError(ValueError):
    """The input file exists but is not a supported WAV encoding."""
