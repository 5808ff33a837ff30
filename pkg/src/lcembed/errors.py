"""Exception hierarchy shared by every module."""


class LCEmbedError(Exception):
    """Base class for all errors raised by lcembed."""


class InputError(LCEmbedError, ValueError):
    """Malformed or out-of-domain input (bad literal, negative mass, ...)."""


class HypothesisViolation(LCEmbedError):
    """A mathematical precondition of a criterion does not hold.

    Examples are mass placed on the spectrum of an inner function, or a base
    measure failing the doubling condition.
    """


class PoleError(InputError):
    """Evaluation requested at a pole."""


class DivergenceError(LCEmbedError):
    """A quadrature or series failed to converge.

    ``partial`` carries the best value available when the failure was detected.
    """

    def __init__(self, message, partial=float("nan")):
        super().__init__(message)
        self.partial = partial
