"""Exception types raised by shentropy."""


class ShentropyError(Exception):
    """Base class for all library errors."""


class DomainError(ShentropyError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class BandLimitError(ShentropyError, ValueError):
    """Requested band limit exceeds what the sampling grid can resolve."""


class OrderError(ShentropyError, ValueError):
    """Truncation order exceeds the band limit of a coefficient pyramid."""


class ResourceError(ShentropyError, MemoryError):
    """Operation would exceed the configured memory budget."""


class DegenerateSpectrumError(ShentropyError, ValueError):
    """Energy spectrum is identically zero, so probabilities are undefined."""


class NoConvergenceError(ShentropyError, RuntimeError):
    """Order selection did not fire before the band limit was reached."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FileFormatError(ShentropyError, ValueError):
    """Malformed input file."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line
