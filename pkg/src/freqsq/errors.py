"""Exception types raised across the package."""

from __future__ import annotations


class FrequencySquareError(ValueError):
    """Base class for every domain error raised by freqsq."""


class DimensionMismatch(FrequencySquareError):
    pass


class SymbolOutOfRange(FrequencySquareError):
    pass


class RowCountViolation(FrequencySquareError):
    def __init__(self, row: int, symbol: int, count: int, expected: int):
        self.row, self.symbol, self.count, self.expected = row, symbol, count, expected
        super().__init__(
            f"row {row} contains symbol {symbol} {count} times (expected {expected})"
        )


class ColumnCountViolation(FrequencySquareError):
    def __init__(self, column: int, symbol: int, count: int, expected: int):
        self.column, self.symbol, self.count, self.expected = column, symbol, count, expected
        super().__init__(
            f"column {column} contains symbol {symbol} {count} times (expected {expected})"
        )


class LengthMismatch(FrequencySquareError):
    pass


class SizeMismatch(FrequencySquareError):
    pass


class ShapeMismatch(FrequencySquareError):
    pass


class WrongSymbolCount(FrequencySquareError):
    pass


class NotADivisor(FrequencySquareError):
    pass


class EntryMismatch(FrequencySquareError):
    pass


class NotAPlex(FrequencySquareError):
    pass


class DivisibilityViolation(FrequencySquareError):
    pass


class OddOrder(FrequencySquareError):
    pass


class TooLarge(FrequencySquareError):
    """A guard on enumeration or exact-search size was exceeded."""


class ParityPreconditionFailed(FrequencySquareError):
    pass


class BudgetExhausted(RuntimeError):
    """A node-count budget ran out before a search completed."""

    def __init__(self, nodes: int):
        self.nodes = nodes
        super().__init__(f"search budget exhausted after {nodes} nodes")
