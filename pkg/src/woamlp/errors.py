"""Exception types shared across the package."""


class DataError(ValueError):
    """Invalid data or configuration content: malformed tables, dimension
    mismatches, bad parameter values, inconsistent serialized models."""


class NumericError(RuntimeError):
    """A computation produced a non-finite value that must be reported
    rather than silently clamped."""
