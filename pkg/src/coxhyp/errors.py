"""Exception types raised by the library.

Everything derives from ``ValueError`` so callers that only care about
"bad input" can catch one thing.
"""


class CoxError(ValueError):
    """Base class for all library errors."""


class ParseError(CoxError):
    pass


class InvalidMatrixError(CoxError):
    pass


class LinkUndefinedError(CoxError):
    """The principal submatrix a link is taken over is not positive definite."""


class NoCommonCellError(CoxError):
    pass


class SizeGuardError(CoxError):
    """Input exceeds an enumeration guard (see ``COX_MAX_N``)."""
