"""Exception hierarchy."""
from __future__ import annotations


class SliceError(Exception):
    """Base class for all package errors."""


class InvalidType(SliceError, ValueError):
    pass


class NotARoot(SliceError, ValueError):
    pass


class InvalidPositiveSystem(SliceError, ValueError):
    pass


class InvalidSimpleSystem(SliceError, ValueError):
    pass


class GeneratorSearchFailed(SliceError):
    def __init__(self, message: str, offending=()):
        super().__init__(message)
        self.offending = tuple(offending)


class RescaleOverflow(SliceError):
    pass


class DimMismatch(SliceError):
    pass


class NormalizationFailed(SliceError):
    pass


class NotInBigCell(SliceError):
    pass


class NotInImage(SliceError):
    pass


class StageAssertionFailed(SliceError):
    def __init__(self, message: str, log=()):
        super().__init__(message)
        self.log = list(log)


class RecipeMismatch(SliceError):
    pass


class VerificationFailed(SliceError):
    pass


class ZeroParameter(SliceError, ValueError):
    pass


class UsageError(SliceError):
    pass
