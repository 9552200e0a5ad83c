import logging

logger = logging.getLogger(__name__)


class IHCalcError(Exception):
    """Base class for every error the engine raises.

    Carries optional stratum / degree context; the stage runner fills in the
    stratum when an error escapes a per-stratum step.
    """

    def __init__(self, message: str, *, stratum: int | None = None, degree: int | None = None):
        super().__init__(message)
        self.message = message
        self.stratum = stratum
        self.degree = degree

    def with_context(self, stratum: int | None = None, degree: int | None = None) -> "IHCalcError":
        if self.stratum is None:
            self.stratum = stratum
        if self.degree is None:
            self.degree = degree
        return self

    def __str__(self) -> str:
        where = []
        if self.stratum is not None:
            where.append(f"stratum {self.stratum}")
        if self.degree is not None:
            where.append(f"degree {self.degree}")
        if where:
            return f"{self.message} ({', '.join(where)})"
        return self.message


# ============================================================================
# Inconsistencies in the bookkeeping itself (exit code 1)
# ============================================================================

class InconsistencyError(IHCalcError):
    pass


class NegativeMultiplicity(InconsistencyError):
    pass


class MismatchedDifferential(InconsistencyError):
    pass


class Contradiction(InconsistencyError):
    pass


class BoundViolation(InconsistencyError):
    pass


# ============================================================================
# Bad input: arguments, partitions, datasets (exit code 2)
# ============================================================================

class UsageError(IHCalcError):
    pass


class NonMonotone(UsageError):
    pass


class TooManyRows(UsageError):
    pass


class OutOfRange(UsageError):
    pass


class BadDims(UsageError):
    pass


class DatasetError(UsageError):
    """Bad dataset content; carries the offending line and file when known."""

    def __init__(self, message: str, *, line: int | None = None, source: str | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        if source:
            message = f"{source}: {message}"
        super().__init__(message)
        self.line = line
        self.source = source

    def with_source(self, source: str | None) -> "DatasetError":
        if source and not self.source:
            self.source = source
            self.message = f"{source}: {self.message}"
            self.args = (self.message,)
        return self


class ParseError(DatasetError):
    pass


class GenusMismatch(DatasetError):
    pass


class DuplicateDegree(DatasetError):
    pass


class MissingDataset(DatasetError):
    pass


# ============================================================================
# Error Classification & Formatting
# ============================================================================

_CATEGORIES = [
    (NegativeMultiplicity, 'NEGATIVE_MULTIPLICITY'),
    (MismatchedDifferential, 'MISMATCHED_DIFFERENTIAL'),
    (Contradiction, 'CONTRADICTION'),
    (BoundViolation, 'BOUND_VIOLATION'),
    (ParseError, 'PARSE_ERROR'),
    (GenusMismatch, 'GENUS_MISMATCH'),
    (DuplicateDegree, 'DUPLICATE_DEGREE'),
    (MissingDataset, 'MISSING_DATASET'),
    (DatasetError, 'DATASET_ERROR'),
    (NonMonotone, 'NON_MONOTONE'),
    (TooManyRows, 'TOO_MANY_ROWS'),
    (OutOfRange, 'OUT_OF_RANGE'),
    (BadDims, 'BAD_DIMS'),
    (UsageError, 'USAGE_ERROR'),
    (InconsistencyError, 'INCONSISTENCY'),
]


def get_error_category(error: Exception) -> str:
    """Classify error into category"""
    for error_type, category in _CATEGORIES:
        if isinstance(error, error_type):
            return category
    return 'UNKNOWN_ERROR'


def is_inconsistency(error: Exception) -> bool:
    return isinstance(error, InconsistencyError)


def exit_code_for_error(error: Exception) -> int:
    if isinstance(error, InconsistencyError):
        return 1
    if isinstance(error, UsageError):
        return 2
    return 1


def format_error_for_display(error: Exception, context: str = "") -> str:
    """Format error for user-friendly display"""
    if is_inconsistency(error):
        error_type = "Inconsistency"
    elif isinstance(error, DatasetError):
        error_type = "Dataset error"
    elif isinstance(error, UsageError):
        error_type = "Usage error"
    else:
        error_type = "Error"

    clean_msg = str(error).split('\n')[0].strip() or type(error).__name__

    if context:
        return f"{error_type} ({context}): {clean_msg}"
    return f"{error_type}: {clean_msg}"
