"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(ValueError):
    """A request exceeds a table's range or the configured memory cap."""
