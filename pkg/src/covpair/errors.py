"""Exception types raised across the package."""


class CovpairError(Exception):
    """Base class for errors raised by covpair."""


class ConstraintViolation(CovpairError, ValueError):
    """(rho, sigma) lies outside the admissible region.

    ``which`` is ``"SigmaBound"`` for 1 - sigma**2 > 0 and ``"XiBound"`` for
    1 - 2 rho**2 + sigma > 0.
    """

    def __init__(self, which, message):
        super().__init__(message)
        self.which = which


class DomainError(CovpairError, ValueError):
    pass


class NonFiniteSample(CovpairError, ArithmeticError):
    """An integrand returned NaN/inf away from its declared singular points."""


class SigmaOutOfRange(CovpairError, ValueError):
    pass


class EmptyInput(CovpairError, ValueError):
    pass


class ConvergenceWarning(UserWarning):
    """Quadrature stopped before meeting its tolerance; result is best effort."""
