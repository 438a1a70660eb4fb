"""Exception types shared across the package."""


class WaldError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(WaldError, ValueError):
    """Malformed input file.  Carries the path and 1-based line number."""

    def __init__(self, message: str, path: str = "<input>", line: int | None = None):
        loc = f"{path}:{line}" if line is not None else path
        super().__init__(f"{loc}: {message}")
        self.path = path
        self.line = line


class DegenerateSamplingError(WaldError, RuntimeError):
    """Rejection rate of the Monte Carlo engine exceeded its cap.

    Raised when more than 1% of proposed draws hit the denominator guard,
    which signals a degenerate pairing of polynomial and covariance matrix
    rather than ordinary floating-point underflow.
    """
