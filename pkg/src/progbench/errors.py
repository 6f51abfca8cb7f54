"""Exception hierarchy.

Bad arguments raise plain :class:`ValueError`.  Problems with files on disk
derive from :class:`DataError`; failures of the external perceptual metric
derive from :class:`ExternalMetricError`.
"""


class DataError(Exception):
    """Unusable input data or I/O failure."""


class EmptyInputError(DataError):
    pass


class FormatError(DataError):
    pass


class DanglingReferenceError(DataError):
    pass


class CoverageError(DataError):
    """A trajectory directory lacks clips or frames the manifest requires."""

    def __init__(self, missing):
        self.missing = list(missing)
        shown = ", ".join(self.missing[:20])
        more = f" (+{len(self.missing) - 20} more)" if len(self.missing) > 20 else ""
        super().__init__(f"missing trajectory data: {shown}{more}")


class ExternalMetricError(Exception):
    def __init__(self, message, output=""):
        self.output = output
        super().__init__(f"{message}: {output.strip()}" if output.strip() else message)


class MetricLookupError(ExternalMetricError, KeyError):
    def __str__(self):
        return self.args[0]


class InvalidInputError(DataError, ValueError):
    """Input files are readable but inconsistent with what they must match."""
