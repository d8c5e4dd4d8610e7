"""Exception hierarchy shared by every module of the package."""


class TubalError(Exception):
    """Base class for all package errors."""


class DimMismatch(TubalError, ValueError):
    """Operand dimensions are incompatible."""


class SymmetryViolation(TubalError, ArithmeticError):
    """A frequency-domain tensor is not the image of a real tensor."""


class NumericalFailure(TubalError, ArithmeticError):
    """A dense kernel (SVD, QR, ...) failed to converge."""


class BadRank(TubalError, ValueError):
    """Requested rank is outside ``[1, min(n1, n2)]``."""


class SingularPreconditioner(TubalError, ArithmeticError):
    """An undamped Gram slice is numerically singular."""


class NegativeDiagonal(TubalError, ValueError):
    """An f-diagonal tensor has a negative frequency-domain diagonal."""


class BadSpec(TubalError, ValueError):
    """A ground-truth or problem specification is inconsistent."""


class ZeroError(TubalError, ZeroDivisionError):
    """A diagnostic is undefined because the estimation error is zero."""


class Diverged(TubalError, ArithmeticError):
    """An iterate blew past the divergence guard."""


class ConfigError(TubalError, ValueError):
    """A run configuration could not be parsed or validated."""
