"""Exception hierarchy and command-line exit codes."""


class IspForgeError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InvalidConfigError(IspForgeError):
    """Physics or recipe configuration violates an invariant."""

    exit_code = 2


class BetaRangeError(IspForgeError):
    """Loss mixing weight beta outside [0, 1]."""

    exit_code = 2


class InsufficientCategoryError(IspForgeError):
    """A quality category holds fewer samples than the composition needs."""

    exit_code = 3


class ContainerFormatError(IspForgeError):
    """Dataset container violates the ispds-1 layout."""

    exit_code = 4


class BadMagicError(ContainerFormatError):
    """Tensor blob does not start with the ISPT magic bytes."""


class VersionMismatchError(ContainerFormatError):
    """Container manifest declares an unsupported format version."""


class TruncatedFileError(ContainerFormatError):
    """Tensor blob payload shorter than its header promises."""


class BadIdxFileError(IspForgeError):
    """IDX image/label file is malformed or truncated."""

    exit_code = 5


class DimensionMismatchError(IspForgeError):
    """Array arguments disagree in shape."""

    exit_code = 5


class MissingFieldsError(IspForgeError):
    """Operation needs total fields that were never solved for."""

    exit_code = 5


class IndivisibleCountError(IspForgeError):
    """Sample count not divisible by the number of quality categories."""

    exit_code = 5


class ZeroSignalError(IspForgeError):
    """Cannot add relative noise to an all-zero scatter matrix."""

    exit_code = 5


class OverlapViolationError(IspForgeError):
    """Benchmark profile regions intersect."""

    exit_code = 5


class SingularSystemError(IspForgeError):
    """Forward-solver factorization failed; carries a condition estimate."""

    exit_code = 6

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class NonConvergenceError(IspForgeError):
    """Eigenfunction series failed to converge below the truncation cap."""

    exit_code = 6
