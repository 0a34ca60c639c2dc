"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration and input problems
exit with 2, degenerate statistics (e.g. all paired differences zero)
exit with 3.
"""


class ScalemineError(Exception):
    """Base class for all scalemine errors."""


class MiningError(ScalemineError):
    """Repository cannot be read or cloned."""


class RecordFormatError(ScalemineError):
    """A persisted commit-record file violates the JSONL schema."""


class EmptyCommitStreamError(ScalemineError):
    """A windowing operation received no commit records."""


class InsufficientDataError(ScalemineError):
    """A regression was requested on fewer than 3 points or degenerate x."""


class DegenerateStatisticsError(ScalemineError):
    """A statistical test has no usable data (all-zero differences,
    empty samples, or no determined pairs)."""


class ConfigError(ScalemineError):
    """A run configuration file or CLI argument is invalid."""
