"""Exception types raised by the stratification engine."""


class PortfolioError(Exception):
    """Base class for all domain errors raised by this package."""


class EmptyPortfolio(PortfolioError):
    """An operation that needs at least one item received none."""


class DuplicateItem(PortfolioError):
    """Two items in one portfolio share an id."""


class NegativeValue(PortfolioError):
    """An item carries a negative (or non-finite) money amount."""


class ZeroTotal(PortfolioError):
    """A share-based computation was asked for on a slice whose values sum to zero."""


class UnknownDimension(PortfolioError):
    """A filter or grouping referred to a hierarchy dimension the portfolio does not have."""


class DegenerateRenormalization(PortfolioError):
    """The revenue share already removed leaves no room for the B class.

    Carries ``removed_share`` so the caller can decide whether C/D
    classification (or D only) is still possible.
    """

    def __init__(self, message: str, removed_share: float):
        super().__init__(message)
        self.removed_share = removed_share


class InvalidPolicy(PortfolioError):
    """A concentration policy violates its structural rules."""


class ParseError(PortfolioError):
    """A portfolio file row could not be parsed.

    ``line`` is the 1-based line number in the input, when known.
    """

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class SchemaError(PortfolioError):
    """A file header, config document, or type invariant does not match the expected schema."""
