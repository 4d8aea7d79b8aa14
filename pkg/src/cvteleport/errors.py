"""Exception types raised by the simulator."""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class DimensionError(ValueError):
    """Cutoff mismatch between an operator and a vector."""


class PreconditionError(ValueError):
    """Input state violates a precondition, e.g. it is not normalized."""


class DegenerateOutcomeError(ArithmeticError):
    """Measurement outcome with vanishing probability density."""


class QuadratureError(ValueError):
    """Malformed integration grid."""


class EnvelopeError(RuntimeError):
    """Rejection-sampling envelope was exceeded by the target density."""
