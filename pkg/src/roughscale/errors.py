"""Exception hierarchy shared across the toolkit.

Three families matter operationally: bad parameter values (caller error),
malformed or insufficient input data (file/schema error), and numerical
failures discovered mid-computation. The CLI maps them to distinct exit
codes.
"""


class ParameterError(ValueError):
    """A parameter lies outside its admissible domain."""


class DataError(ValueError):
    """Input data is malformed, incomplete, or too short."""


class SchemaError(DataError):
    """A required column or field is missing from an input file."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (degenerate moment, factorization, rank)."""
