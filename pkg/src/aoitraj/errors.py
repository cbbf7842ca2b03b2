"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class CapacityError(DomainError):
    """A problem instance is too large for the requested exact method."""
