"""Exception and warning classes shared across the toolkit."""


class QcbError(Exception):
    """Base class for computation errors raised by this package."""


class NonHermitian(QcbError, ValueError):
    pass


class NoConvergence(QcbError, RuntimeError):
    pass


class InvalidState(QcbError, ValueError):
    pass


class BadSubsystem(QcbError, ValueError):
    pass


class BadDims(QcbError, ValueError):
    pass


class DimMismatch(BadDims):
    pass


class DomainError(QcbError, ValueError):
    pass


class OutOfRange(QcbError, ValueError):
    pass


class ZeroDistance(QcbError, ValueError):
    pass


class SolverFailure(QcbError, RuntimeError):
    pass


class IterationCap(SolverFailure):
    pass


class UnsupportedFamily(QcbError, ValueError):
    pass


class DimCap(QcbError, ValueError):
    pass


class TruncationWarning(UserWarning):
    """Gibbs weight on the highest retained level exceeds the adequacy threshold."""


class FormatError(QcbError, ValueError):
    """Malformed JSON input."""
