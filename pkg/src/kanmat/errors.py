"""Exception types shared across the package.

Callers branch on these: matrix assembly turns ``ConstantColumnError`` into
flagged zero-strength cells, the CLI maps ``CsvParseError`` and I/O failures
to exit code 1 and every other ``KanmatError`` to exit code 2, and the HTTP
service maps them to 400/422 responses.
"""


class KanmatError(ValueError):
    """Base class for domain and precondition errors."""


class CsvParseError(KanmatError):
    """CSV ingestion failed (bad header, non-numeric cell, no data rows)."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class TransformError(KanmatError):
    """A column transform is invalid against the current dataset."""


class ConstantColumnError(KanmatError):
    """CONSTANT_COLUMN: a column with fewer than two distinct values."""


class ZeroMeanObsError(KanmatError):
    """ZERO_MEAN_OBS: KGE bias ratio is undefined for zero-mean observations."""
