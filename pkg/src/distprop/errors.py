"""Exception hierarchy shared by every module in the package."""


class DistpropError(Exception):
    """Base class for all errors raised by distprop."""


class ArgumentError(DistpropError, ValueError):
    """An argument is outside the accepted range (counts, sizes, shapes)."""


class DomainError(DistpropError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class ConfigError(DistpropError, ValueError):
    """An experiment or distribution config is malformed or unsupported."""


class FormatError(DistpropError, ValueError):
    """A file does not follow the expected CSV / text schema."""


class UnsupportedTransformError(DistpropError, TypeError):
    """A transform lacks the pieces (inverse, derivative, monotonicity) an operation needs."""


class NumericalError(DistpropError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularityError(NumericalError):
    """Division by zero or a vanishing Jacobian."""


class NonFiniteError(NumericalError):
    """An evaluation produced inf or NaN."""

    def __init__(self, message, count=0):
        super().__init__(message)
        self.count = count


class PropagationError(NumericalError):
    """Failure while propagating a Dirac mixture through an expression."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class DependentBasisError(NumericalError):
    """Gram-Schmidt hit a (numerically) linearly dependent response."""

    def __init__(self, index, norm):
        super().__init__(
            f"response {index} is linearly dependent on the previous ones (residual norm {norm:.3e})",
            residual=norm,
        )
        self.index = index


class SourceDepletedError(DistpropError, RuntimeError):
    """A replayed noise recording ran out of values."""


class ChecksumError(DistpropError, IOError):
    """A cached file does not match its checksum sidecar."""
