"""Exception hierarchy shared by all stablehit modules."""


class StableHitError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(StableHitError, ValueError):
    """The (alpha, rho) pair or another numeric input is out of range."""


class DomainError(StableHitError, ValueError):
    """Argument outside the domain where a formula is defined."""


class StripError(DomainError):
    """Complex argument outside the vertical strip of validity."""

    def __init__(self, name, value, lo, hi):
        self.lo, self.hi, self.value = lo, hi, value
        super().__init__(f"{name}: Re(s)={complex(value).real:.6g} outside ({lo:.6g}, {hi:.6g})")


class PoleError(DomainError):
    """Evaluation at (or numerically too close to) a pole."""


class NonFiniteError(StableHitError, ArithmeticError):
    """A computation produced NaN or infinity."""


class DegenerateError(StableHitError, ArithmeticError):
    """Eigenvalues coincide where a simple leading eigenvalue is required."""


class ResonanceError(StableHitError, ArithmeticError):
    """A small-denominator sine was met in a series meant for irrational alpha."""


class ClassificationError(StableHitError, ValueError):
    """Series routine called with an alpha of the wrong arithmetic class."""


class NotInKError(StableHitError, ValueError):
    """Truncation index is not a member of the admissible index set K(alpha)."""


class ToleranceUnreachable(StableHitError, ArithmeticError):
    """The requested accuracy cannot be met within the numerical guards."""


class ValidationFailure(StableHitError):
    """A validation check in the report did not pass."""
