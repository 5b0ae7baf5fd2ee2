"""Exception types shared across the toolkit.

Every contract violation raised by logcone derives from LogconeError so
callers (and the CLI) can distinguish domain errors from bad input.
"""


class LogconeError(Exception):
    """Base class for all contract violations raised by this package."""


# grid construction / quadrature
class ZeroMass(LogconeError):
    pass


class NotNormalized(LogconeError):
    pass


class NotIsotropic(LogconeError):
    pass


# measure transformations
class DimensionOverflow(LogconeError):
    pass


class DimensionMismatch(LogconeError):
    pass


class DimensionTooLow(LogconeError):
    pass


class SingularMap(LogconeError):
    pass


class NotOrthonormal(LogconeError):
    pass


class GridNotCentered(LogconeError):
    pass


class DegenerateCovariance(LogconeError):
    pass


class LevelOutOfRange(LogconeError):
    pass


# spectral layer
class EpsOutOfRange(LogconeError):
    pass


class NotIdentitySum(LogconeError):
    pass


class NotPSD(LogconeError):
    pass


class InternalContractViolation(LogconeError):
    pass


class DiagonalConstraintViolated(LogconeError):
    pass


class NoConvergence(LogconeError):
    pass


# lipschitz machinery
class DeltaTooSmall(LogconeError):
    pass


class CovarianceContractViolated(LogconeError):
    pass


# families
class BadParameters(LogconeError):
    pass


class LcgridFormatError(ValueError):
    """Malformed LCGRID file.  Deliberately *not* a LogconeError: the CLI
    maps it to the bad-input exit code rather than the contract-violation one."""
