"""Exception types shared across file parsers and validators."""


class FileFormatError(ValueError):
    """A file does not conform to the expected format.

    Raised by every reader in this package for malformed, truncated or
    otherwise unparseable input, so callers can catch a single type.
    """


class MalformedFileError(FileFormatError):
    """An HDF5 container is missing a required group or dataset.

    The offending location inside the file is kept in ``path_in_file``.
    """

    def __init__(self, message: str, path_in_file: str | None = None):
        super().__init__(message)
        self.path_in_file = path_in_file


class SingularKernelError(ValueError):
    """Kernel matrix is singular or numerically ill-conditioned."""
