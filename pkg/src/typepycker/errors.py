from __future__ import annotations


class TypePyckerError(Exception):
    """Base class for diagnostics about a SimpliPy program."""

    def __init__(self, message: str, span=None):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}" if span is not None else message)


class ParseError(TypePyckerError):
    pass


class DuplicateDef(ParseError):
    pass


class ResolveError(TypePyckerError):
    pass


class UnboundIdentifier(ResolveError):
    pass


class StaticTypeError(TypePyckerError):
    def __init__(self, message: str, span=None, source=None, target=None):
        super().__init__(message, span)
        self.source = source
        self.target = target


class ArityMismatch(TypePyckerError):
    pass


class UnknownSite(TypePyckerError):
    pass


class TooManySites(TypePyckerError):
    pass
