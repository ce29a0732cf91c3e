"""Exception hierarchy.

Every numeric failure derives from :class:`NumericError` so the CLI can map it
to exit code 1; invalid user input derives from :class:`ValidationError`
(exit code 2).
"""


class RspcatError(Exception):
    """Base class for all package errors."""


class ValidationError(RspcatError, ValueError):
    """Invalid input or configuration."""


class NumericError(RspcatError, ArithmeticError):
    """A computation could not be carried out to the required accuracy."""


class CutoffTooSmall(NumericError):
    """Fock truncation would discard more than the allowed tail mass."""


class CutoffTooLargeForOracle(ValidationError):
    """Requested 4-index materialization is beyond the memory guard."""


class DegenerateCat(NumericError):
    """Odd cat state requested at vanishing amplitude (norm is zero)."""


class VacuumSubtraction(NumericError):
    """Photon subtraction annihilates the state: the herald never fires."""


class Unphysical(ValidationError):
    """Covariance data violates the uncertainty principle."""


class NoSolution(NumericError):
    """The covariance matrix cannot be reached by the effective model."""


class NonConvergence(NumericError):
    """Iterative reconstruction stopped before reaching tolerance.

    The best iterate is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
