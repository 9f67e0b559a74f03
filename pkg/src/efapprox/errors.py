"""Exception types shared across the package."""


class EfapproxError(Exception):
    """Base class for all package-specific errors."""


class ZeroVector(EfapproxError):
    """A nonzero vector was required."""


class PoleAtZero(EfapproxError):
    """Evaluation of a Laurent polynomial with negative exponents at 0."""


class RecurrenceSingular(EfapproxError):
    """Leading recurrence coefficient vanished at some index."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"leading recurrence coefficient vanishes at n={index}")


class NoGrowthBound(EfapproxError):
    """No usable geometric growth certificate for a series."""


class InsufficientCoefficients(EfapproxError):
    """A truncated coefficient table was asked for terms beyond its length."""


class NotDesingularized(EfapproxError):
    """System coefficients are not Laurent polynomials (finite nonzero pole)."""


class IntegralityViolated(EfapproxError):
    """A quantity that must be an exact integer was not; signals an upstream bug."""


class BallDomainError(EfapproxError):
    """Ball operation undefined (e.g. reciprocal of a ball containing 0)."""


class SystemValidationError(EfapproxError):
    """A system document failed schema or semantic validation."""

    def __init__(self, message: str, path: str | None = None, location: str | None = None):
        self.path = path
        self.location = location
        detail = message
        if location:
            detail = f"{location}: {detail}"
        if path:
            detail = f"{path}: {detail}"
        super().__init__(detail)
