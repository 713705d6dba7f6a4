"""
Exception types shared across the toolkit.
"""


class GrowingExpertsError(Exception):
    """Base exception for the toolkit."""
    pass


class InvalidInputError(GrowingExpertsError, ValueError):
    """Raised when an operation receives arguments outside its domain."""
    pass


class DegenerateStateError(GrowingExpertsError):
    """Raised when a weight state cannot produce a prediction."""
    pass


class GuardExceededError(GrowingExpertsError):
    """Raised when an exhaustive computation would exceed its size guard."""
    pass


class EmptyComparatorClassError(GrowingExpertsError):
    """Raised when a comparator class has no member."""
    pass


class ConfigError(GrowingExpertsError):
    """Raised for invalid run configuration."""
    pass


class ExperimentError(GrowingExpertsError):
    """Raised when an experiment fails at runtime."""
    pass
