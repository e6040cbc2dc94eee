"""Exception hierarchy shared by all modules."""


class CritampError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CritampError, ValueError):
    """An argument lies outside the region where a computation is valid."""


class PoleError(DomainError, ZeroDivisionError):
    """Evaluation at a pole of a conjugation or of a Laurent series."""


class EscapeToInfinity(CritampError, OverflowError):
    """An orbit left the escape disk before the requested number of steps."""

    def __init__(self, step, value, threshold):
        self.step = step
        self.value = value
        self.threshold = threshold
        super().__init__(
            f"orbit escaped |z| > {threshold:g} at step {step}"
        )


class CertificationError(CritampError):
    """The sufficient conditions for a remainder envelope were not met."""


class ConvergenceError(CritampError, ArithmeticError):
    """An iterative procedure did not reach its tolerance within its cap."""


class PrecisionError(CritampError, ArithmeticError):
    """The requested tolerance is below what the working precision supports."""


class PopulationOverflow(CritampError, OverflowError):
    """A simulated population exceeded the representable cap."""
