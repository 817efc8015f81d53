"""Exception hierarchy shared by all epidisagg modules."""

from __future__ import annotations


class EpiDisaggError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EpiDisaggError, ValueError):
    """An argument lies outside the domain in which an operation is defined."""


class RangeError(DomainError):
    """A date or year falls outside the supported 1990-2100 window."""


class InsufficientDataError(DomainError):
    """Too few observations for the requested method."""


class UndefinedMetricError(DomainError):
    """A metric is mathematically undefined for its inputs (e.g. R² on a constant reference)."""


class AlignmentError(EpiDisaggError):
    """Two series, or a series and a calendar map, do not cover the same span."""


class ContiguityError(EpiDisaggError):
    """A unit has a gap in its month or week sequence."""

    def __init__(self, unit_id: str, missing: object):
        self.unit_id = unit_id
        self.missing = missing
        super().__init__(f"unit {unit_id!r}: missing period {missing}")


class DuplicateKeyError(EpiDisaggError):
    """The same (unit, period) key appears more than once in an input file."""


class ParseError(EpiDisaggError):
    """A malformed input file. ``line`` is 1-based and counts the header."""

    def __init__(self, path: object, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class MissingCovariateError(EpiDisaggError):
    """A covariate has no series for a unit present in the target."""

    def __init__(self, covariate: str, unit_id: str):
        self.covariate = covariate
        self.unit_id = unit_id
        super().__init__(f"covariate {covariate!r} has no series for unit {unit_id!r}")
