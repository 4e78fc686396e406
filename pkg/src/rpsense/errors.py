"""Exception types shared across the package."""


class RPSenseError(Exception):
    """Base class for all errors raised by rpsense."""


class ValidationError(RPSenseError, ValueError):
    """Invalid input: wrong shape, out-of-range parameter, bad index."""


class CapacityError(RPSenseError):
    """Requested Hilbert space or grid exceeds the configured budget."""


class NumericalError(RPSenseError, ArithmeticError):
    """A numerical routine failed or produced an out-of-range result."""


class NoCrossingError(ValidationError):
    """Root bracket has no sign change."""


class InsufficientPeaksError(RPSenseError):
    """Fewer peaks were detected than the field inversion needs."""
