"""Exception hierarchy shared by every gfm module."""

from __future__ import annotations


class GFMError(Exception):
    """Base class for all errors raised by gfm."""

    #: 1-based index of the chain segment that failed, set by the resolver.
    segment: int | None = None
    #: Name of the offending parameter, when one is known.
    parameter: str | None = None

    def __init__(self, message: str = "", *, parameter: str | None = None):
        super().__init__(message)
        if parameter is not None:
            self.parameter = parameter

    @property
    def code(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        msg = super().__str__()
        if self.segment is not None:
            msg = f"segment {self.segment}: {msg}"
        return msg


# artifact loading and extraction

class FileUnreadable(GFMError):
    pass


class UnknownMediaType(GFMError):
    pass


class SpanOutOfRange(GFMError):
    pass


# indexer registry and anchor validation

class DuplicateIndexer(GFMError):
    pass


class ValidationError(GFMError):
    """An anchor does not bind its indexer's tuple token correctly."""

    def __init__(self, message: str = "", *, parameter: str | None = None):
        super().__init__(message, parameter=parameter)
        self.violations: list[ValidationError] = [self]


class UnknownIndexer(ValidationError):
    pass


class UnknownParameter(ValidationError):
    pass


class MissingParameter(ValidationError):
    pass


class MisorderedParameter(ValidationError):
    pass


class DomainViolation(ValidationError):
    pass


class UnknownColumn(DomainViolation):
    pass


class NestedKindMismatch(DomainViolation):
    pass


class MediaTypeMismatch(ValidationError):
    pass


class ForeignFragment(ValidationError):
    pass


# resolution

class ResolverFailure(GFMError):
    """Media content turned out to be malformed, or cannot be viewed as required."""


class EmptyInput(GFMError):
    pass


class PatternError(GFMError):
    pass


class NoMatch(GFMError):
    pass


# expression syntax

class ExpressionSyntaxError(GFMError):
    """Raised by the expression parser; ``offset`` is a UTF-8 byte offset."""

    def __init__(self, message: str, offset: int, expected: str = ""):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at byte {offset}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


# hyperknowledge model

class DuplicateNode(GFMError):
    pass


class DuplicateAnchor(GFMError):
    pass


class UnknownNode(GFMError):
    pass


class UnknownAnchorRef(GFMError):
    pass


class UnboundNode(GFMError):
    pass


class ModelFormatError(GFMError):
    """A persisted model document does not follow the expected layout."""


class InvalidIdentifier(GFMError):
    pass
