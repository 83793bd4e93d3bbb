"""Exception types shared across the pipeline."""


class DataError(ValueError):
    """Malformed or inconsistent input data (CSV parse errors, duplicates, shape mismatches)."""


class DegenerateInputError(ValueError):
    """A statistic is undefined for the given input (e.g. rank correlation of a constant vector)."""


class UndefinedDistanceError(ValueError):
    """Angular distance is undefined because one of the vectors is all-zero."""


class ConfigError(ValueError):
    """Invalid pipeline configuration (unknown key, bad value, missing required field)."""
