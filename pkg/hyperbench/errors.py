"""Exceptions raised by the hyperbench library.

Library code raises; the CLI turns these into status dicts and exit codes.
"""


class HyperbenchError(ValueError):
    """Base class for every error the workbench raises on bad input."""


class DimensionMismatchError(HyperbenchError):
    pass


class DuplicateFrequencyError(HyperbenchError):
    pass


class TruncationTooSmallError(HyperbenchError):
    pass


class UnsupportedNormError(HyperbenchError):
    pass


class SizeGuardError(HyperbenchError):
    """A computation would materialize more entries than the configured guard."""


class NoLocalUnitError(HyperbenchError):
    pass


class InvalidGroupTableError(HyperbenchError):
    pass


class UnknownPresetError(HyperbenchError):
    pass
