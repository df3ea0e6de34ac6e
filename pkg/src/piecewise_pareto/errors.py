"""Exception hierarchy shared by every module of the package."""


class ParetoError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParams(ParetoError, ValueError):
    pass


class DomainError(ParetoError, ValueError):
    pass


class MomentUndefined(ParetoError, ValueError):
    pass


class EmptyInput(ParetoError, ValueError):
    pass


class NonPositiveValue(ParetoError, ValueError):
    pass


class ParseError(ParetoError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoTailData(ParetoError):
    pass


class NoSolutionInRange(ParetoError):
    pass


class NoValidBeta(ParetoError):
    pass


class NoValidFit(ParetoError):
    pass


class NoSignChange(ParetoError):
    pass


class MaxIterExceeded(ParetoError):
    pass


class DegenerateSample(ParetoError, ValueError):
    pass
