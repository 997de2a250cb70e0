"""Exception hierarchy shared by all qcturbo modules."""


class QcTurboError(Exception):
    """Base class for package errors."""


class ValidationError(QcTurboError, ValueError):
    """An argument or interleaver description violates a documented invariant."""


class ConstructionError(QcTurboError, RuntimeError):
    """A randomized construction gave up within its attempt budget."""


class ResourceLimitError(QcTurboError, RuntimeError):
    """The requested computation exceeds the configured size limit."""


class TailBitingError(ValidationError):
    """Tail-biting encoding is impossible for this block length."""


class InconclusiveError(QcTurboError, RuntimeError):
    """A certification step could not conclude with the given budget."""
