"""Frequency squares, diagonals and the equivalence transforms acting on them.

Conventions: symbols are stored 1-based (``1..m``) exactly as they appear in
text formats; rows, columns and diagonal entries are 0-based in memory and
converted to 1-based only at I/O boundaries (see :mod:`freqsq.formats`).
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    ColumnCountViolation,
    DimensionMismatch,
    LengthMismatch,
    NotAPlex,
    RowCountViolation,
    SizeMismatch,
    SymbolOutOfRange,
)

MAX_ORDER = 64

Grid = tuple[tuple[int, ...], ...]


class Kind(enum.Enum):
    GENERAL = "general"
    LATIN = "latin"


@dataclass(frozen=True)
class FrequencySquare:
    """A validated square of type F(n; lam^m).

    Build instances with :func:`validate`; the constructor itself performs no
    checks and is reserved for code that produces valid grids by construction.
    """

    n: int
    m: int
    lam: int
    grid: Grid = field(repr=False)

    @property
    def kind(self) -> Kind:
        return Kind.LATIN if self.lam == 1 else Kind.GENERAL

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.grid[r][c]

    def rows(self) -> Grid:
        return self.grid

    def columns(self) -> Grid:
        return tuple(zip(*self.grid))

    def transpose(self) -> "FrequencySquare":
        return FrequencySquare(self.n, self.m, self.lam, tuple(zip(*self.grid)))

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.grid]


def _as_grid(grid: Iterable[Iterable[int]]) -> Grid:
    return tuple(tuple(int(x) for x in row) for row in grid)


def validate(grid: Iterable[Iterable[int]], m: int, lam: int) -> FrequencySquare:
    """Check ``grid`` is an F(m*lam; lam^m) square and freeze it."""
    g = _as_grid(grid)
    n = len(g)
    if m < 1 or lam < 1:
        raise DimensionMismatch(f"m and lambda must be positive (got m={m}, lambda={lam})")
    if any(len(row) != n for row in g):
        raise DimensionMismatch("grid is not square")
    if n != m * lam:
        raise DimensionMismatch(f"n={n} but m*lambda={m * lam}")
    if n > MAX_ORDER:
        raise DimensionMismatch(f"n={n} exceeds the supported envelope n <= {MAX_ORDER}")
    for r, row in enumerate(g):
        for c, x in enumerate(row):
            if not 1 <= x <= m:
                raise SymbolOutOfRange(f"entry {x} at ({r + 1},{c + 1}) is outside 1..{m}")
    for r, row in enumerate(g):
        counts = Counter(row)
        for s in range(1, m + 1):
            if counts[s] != lam:
                raise RowCountViolation(r + 1, s, counts[s], lam)
    for c, col in enumerate(zip(*g)):
        counts = Counter(col)
        for s in range(1, m + 1):
            if counts[s] != lam:
                raise ColumnCountViolation(c + 1, s, counts[s], lam)
    return FrequencySquare(n, m, lam, g)


def check_frequencies(grid: Iterable[Iterable[int]], lambdas: Sequence[int]) -> bool:
    """True iff ``grid`` is of type F(n; lambdas[0], ..., lambdas[-1]).

    Unequal frequencies are only supported here; nothing else in the package
    accepts such squares.
    """
    g = _as_grid(grid)
    n = len(g)
    if any(len(row) != n for row in g) or sum(lambdas) != n:
        return False
    want = {s + 1: f for s, f in enumerate(lambdas)}
    for line in list(g) + list(zip(*g)):
        counts = Counter(line)
        if set(counts) - set(want):
            return False
        if any(counts[s] != f for s, f in want.items()):
            return False
    return True


@dataclass(frozen=True)
class Diagonal:
    """A permutation choosing column ``sigma[i]`` in row ``i`` (0-based)."""

    sigma: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise ValueError(f"not a permutation: {self.sigma}")

    @classmethod
    def of(cls, sigma: Iterable[int]) -> "Diagonal":
        return cls(tuple(sigma))

    @classmethod
    def from_one_based(cls, sigma: Iterable[int]) -> "Diagonal":
        return cls(tuple(c - 1 for c in sigma))

    @classmethod
    def main(cls, n: int) -> "Diagonal":
        return cls(tuple(range(n)))

    def one_based(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.sigma)

    def cells(self) -> list[tuple[int, int]]:
        return list(enumerate(self.sigma))

    def inverse(self) -> "Diagonal":
        inv = [0] * len(self.sigma)
        for r, c in enumerate(self.sigma):
            inv[c] = r
        return Diagonal(tuple(inv))

    def __len__(self) -> int:
        return len(self.sigma)


@dataclass(frozen=True)
class SymbolCounts:
    counts: dict[int, int]

    def __getitem__(self, s: int) -> int:
        return self.counts[s]

    def total(self) -> int:
        return sum(self.counts.values())


def diagonal_counts(square: FrequencySquare, d: Diagonal) -> SymbolCounts:
    if len(d.sigma) != square.n:
        raise LengthMismatch(f"diagonal has length {len(d.sigma)}, square has n={square.n}")
    counts = dict.fromkeys(range(1, square.m + 1), 0)
    g = square.grid
    for r, c in enumerate(d.sigma):
        counts[g[r][c]] += 1
    return SymbolCounts(counts)


def is_balanced(square: FrequencySquare, d: Diagonal) -> bool:
    counts = diagonal_counts(square, d)
    return all(v == square.lam for v in counts.counts.values())


def _inverse_perm(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def _is_perm(p: Sequence[int], size: int) -> bool:
    return len(p) == size and sorted(p) == list(range(size))


@dataclass(frozen=True)
class Transform:
    """An element of the equivalence group, all components 0-based.

    Applied as: transpose (if set), move row ``i`` to ``row_perm[i]``, move
    column ``j`` to ``col_perm[j]``, then relabel symbol ``s`` (1-based) to
    ``symbol_perm[s-1] + 1``.
    """

    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]
    symbol_perm: tuple[int, ...]
    transposed: bool = False

    def __post_init__(self) -> None:
        n = len(self.row_perm)
        if not (_is_perm(self.row_perm, n) and _is_perm(self.col_perm, n)):
            raise SizeMismatch("row/column permutations are invalid or of different sizes")
        if not _is_perm(self.symbol_perm, len(self.symbol_perm)):
            raise SizeMismatch("symbol permutation is invalid")

    @classmethod
    def identity(cls, n: int, m: int) -> "Transform":
        return cls(tuple(range(n)), tuple(range(n)), tuple(range(m)), False)

    @property
    def n(self) -> int:
        return len(self.row_perm)

    @property
    def m(self) -> int:
        return len(self.symbol_perm)

    def then(self, other: "Transform") -> "Transform":
        """The transform equal to applying ``self`` first and ``other`` second."""
        if (self.n, self.m) != (other.n, other.m):
            raise SizeMismatch("cannot compose transforms of different sizes")
        if other.transposed:
            rows = tuple(other.row_perm[x] for x in self.col_perm)
            cols = tuple(other.col_perm[x] for x in self.row_perm)
        else:
            rows = tuple(other.row_perm[x] for x in self.row_perm)
            cols = tuple(other.col_perm[x] for x in self.col_perm)
        syms = tuple(other.symbol_perm[x] for x in self.symbol_perm)
        return Transform(rows, cols, syms, self.transposed != other.transposed)

    def inverse(self) -> "Transform":
        syms = _inverse_perm(self.symbol_perm)
        if self.transposed:
            return Transform(_inverse_perm(self.col_perm), _inverse_perm(self.row_perm), syms, True)
        return Transform(_inverse_perm(self.row_perm), _inverse_perm(self.col_perm), syms, False)


def transform_grid(grid: Grid, t: Transform) -> Grid:
    n = len(grid)
    src = tuple(zip(*grid)) if t.transposed else grid
    out = [[0] * n for _ in range(n)]
    p, q, s = t.row_perm, t.col_perm, t.symbol_perm
    for i, row in enumerate(src):
        dest = out[p[i]]
        for j, x in enumerate(row):
            dest[q[j]] = s[x - 1] + 1
    return tuple(tuple(row) for row in out)


def apply_transform(square: FrequencySquare, t: Transform) -> FrequencySquare:
    if t.n != square.n or t.m != square.m:
        raise SizeMismatch(
            f"transform acts on n={t.n}, m={t.m}; square has n={square.n}, m={square.m}"
        )
    return FrequencySquare(square.n, square.m, square.lam, transform_grid(square.grid, t))


def map_diagonal(d: Diagonal, t: Transform) -> Diagonal:
    """Carry ``d`` along ``t`` so it selects the image cells."""
    if len(d.sigma) != t.n:
        raise SizeMismatch(f"diagonal has length {len(d.sigma)}, transform acts on n={t.n}")
    sigma = d.inverse().sigma if t.transposed else d.sigma
    out = [0] * t.n
    for r, c in enumerate(sigma):
        out[t.row_perm[r]] = t.col_perm[c]
    return Diagonal(tuple(out))


@dataclass(frozen=True)
class PlexSelection:
    """A set of 0-based cells of a Latin square meeting every row, column and
    symbol exactly ``k`` times.  Use :func:`make_plex` to get a checked one."""

    cells: frozenset[tuple[int, int]]
    k: int

    def sorted_cells(self) -> list[tuple[int, int]]:
        return sorted(self.cells)


def plex_violation(square: FrequencySquare, cells: Iterable[tuple[int, int]], k: int) -> str | None:
    """Describe why ``cells`` is not a k-plex of ``square``, or None if it is."""
    if square.kind is not Kind.LATIN:
        return "plexes are defined on Latin squares only"
    cells = list(cells)
    if len(set(cells)) != len(cells):
        return "repeated cell"
    n = square.n
    rows, cols, syms = Counter(), Counter(), Counter()
    for r, c in cells:
        if not (0 <= r < n and 0 <= c < n):
            return f"cell ({r + 1},{c + 1}) out of range"
        rows[r] += 1
        cols[c] += 1
        syms[square.grid[r][c]] += 1
    for label, counter, keys in (
        ("row", rows, range(n)),
        ("column", cols, range(n)),
        ("symbol", syms, range(1, n + 1)),
    ):
        for key in keys:
            if counter[key] != k:
                shown = key if label == "symbol" else key + 1
                return f"{label} {shown} hit {counter[key]} times, expected {k}"
    return None


def make_plex(square: FrequencySquare, cells: Iterable[tuple[int, int]], k: int) -> PlexSelection:
    cells = frozenset(cells)
    why = plex_violation(square, cells, k)
    if why is not None:
        raise NotAPlex(why)
    return PlexSelection(cells, k)
