"""k-plex search in Latin squares and decomposition of a plex into diagonals."""

from __future__ import annotations

from itertools import combinations

from .core import Diagonal, FrequencySquare, Kind, PlexSelection, plex_violation
from .errors import BudgetExhausted, NotAPlex


def find_k_plex(
    square: FrequencySquare, k: int, budget: int | None = None
) -> PlexSelection | None:
    """Return some k-plex of the Latin square, or None if none exists.

    Rows are filled in order, each taking ``k`` columns; a branch dies as soon
    as a column or a symbol is used more than ``k`` times, or when the rows left
    cannot supply the symbol occurrences still missing.  Raises
    :class:`BudgetExhausted` when ``budget`` nodes have been expanded.
    """
    if square.kind is not Kind.LATIN:
        raise NotAPlex("plexes are defined on Latin squares only")
    n = square.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    g = square.grid
    col_left = [k] * n
    sym_left = [k] * (n + 1)
    chosen: list[tuple[int, ...]] = []
    nodes = 0

    # every row holds each symbol once, so symbol s can gain at most one per row
    def dfs(r: int) -> bool:
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise BudgetExhausted(nodes)
        if r == n:
            return True
        rows_left = n - r
        for s in range(1, n + 1):
            if sym_left[s] > rows_left:
                return False
        row = g[r]
        open_cols = [c for c in range(n) if col_left[c] and sym_left[row[c]]]
        # columns still needing more hits than rows remain force their selection
        forced = [c for c in range(n) if col_left[c] == rows_left]
        for cols in combinations(open_cols, k):
            if forced and not all(c in cols for c in forced):
                continue
            for c in cols:
                col_left[c] -= 1
                sym_left[row[c]] -= 1
            chosen.append(cols)
            if dfs(r + 1):
                return True
            chosen.pop()
            for c in cols:
                col_left[c] += 1
                sym_left[row[c]] += 1
        return False

    if not dfs(0):
        return None
    cells = frozenset((r, c) for r, cols in enumerate(chosen) for c in cols)
    return PlexSelection(cells, k)


def _perfect_matching(adj: list[set[int]], n: int) -> list[int] | None:
    """Kuhn's augmenting-path matching; returns match[row] = column."""
    match_col = [-1] * n

    def augment(r: int, seen: list[bool]) -> bool:
        for c in sorted(adj[r]):
            if seen[c]:
                continue
            seen[c] = True
            if match_col[c] == -1 or augment(match_col[c], seen):
                match_col[c] = r
                return True
        return False

    for r in range(n):
        if not augment(r, [False] * n):
            return None
    match_row = [0] * n
    for c, r in enumerate(match_col):
        match_row[r] = c
    return match_row


def decompose_plex(plex: PlexSelection, n: int | None = None) -> list[Diagonal]:
    """Split a k-plex into k cell-disjoint diagonals.

    The cells form a k-regular bipartite row/column graph, so perfect matchings
    can be peeled off one at a time.
    """
    cells = plex.cells
    if n is None:
        n = max(max(r, c) for r, c in cells) + 1
    k = plex.k
    adj: list[set[int]] = [set() for _ in range(n)]
    for r, c in cells:
        adj[r].add(c)
    if any(len(a) != k for a in adj) or len(cells) != n * k:
        raise NotAPlex("cells are not k-regular in rows")
    col_deg = [0] * n
    for _, c in cells:
        col_deg[c] += 1
    if any(d != k for d in col_deg):
        raise NotAPlex("cells are not k-regular in columns")
    out = []
    for _ in range(k):
        sigma = _perfect_matching(adj, n)
        if sigma is None:  # pragma: no cover - regular bipartite graphs always match
            raise NotAPlex("no perfect matching found")
        for r, c in enumerate(sigma):
            adj[r].discard(c)
        out.append(Diagonal(tuple(sigma)))
    return out


def checked_plex(square: FrequencySquare, plex: PlexSelection) -> PlexSelection:
    why = plex_violation(square, plex.cells, plex.k)
    if why is not None:
        raise NotAPlex(why)
    return plex
