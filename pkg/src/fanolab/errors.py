"""Shared exception types."""


class BudgetExceeded(Exception):
    """An enumeration or scan would exceed the configured budget."""


class ContainmentError(ValueError):
    """The curve is not contained in the complete intersection."""
