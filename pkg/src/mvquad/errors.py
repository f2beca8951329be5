"""Exception hierarchy shared by all modules."""


class MVQError(Exception):
    """Base class for every error raised by mvquad."""


class DomainError(MVQError, ValueError):
    """Argument outside the mathematical domain of a function."""


class RangeError(MVQError, ValueError):
    """Argument outside the documented supported range."""


class UnsupportedDimensionError(MVQError, ValueError):
    pass


class UnsupportedOrderError(MVQError, ValueError):
    pass


class PreconditionError(MVQError, ValueError):
    """An identity or coefficient was requested outside its hypotheses."""


class UsageError(MVQError, ValueError):
    pass


class CapabilityError(MVQError, TypeError):
    """A field lacks a capability (gradient, laplacian) that an operation needs."""


class NumericalError(MVQError, ArithmeticError):
    pass


class EstimationError(MVQError, ValueError):
    pass


class LatticeError(UsageError):
    """Malformed grid file; ``line`` is the 1-based offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
