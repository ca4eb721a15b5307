"""Equivalence of frequency squares under row/column permutation, symbol
relabelling and transposition."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import permutations

from .constructions import make_A
from .core import FrequencySquare, Grid, Transform, apply_transform, transform_grid
from .errors import ShapeMismatch, TooLarge, WrongSymbolCount

CANONICAL_MAX_N = 12


@dataclass(frozen=True)
class EquivalenceCertificate:
    """``apply_transform(source, transform)`` reproduces the target exactly."""

    transform: Transform

    def replay(self, source: FrequencySquare) -> FrequencySquare:
        return apply_transform(source, self.transform)

    def inverse(self) -> "EquivalenceCertificate":
        return EquivalenceCertificate(self.transform.inverse())

    def then(self, other: "EquivalenceCertificate") -> "EquivalenceCertificate":
        return EquivalenceCertificate(self.transform.then(other.transform))


def _row_fingerprints(grid: Grid) -> list[tuple]:
    """Per row, the sorted multiset over other rows of the (own, other) symbol
    pair counts.  Invariant under column permutations and row relabelling."""
    n = len(grid)
    out = []
    for i in range(n):
        gi = grid[i]
        prof = []
        for k in range(n):
            if k != i:
                prof.append(tuple(sorted(Counter(zip(gi, grid[k])).items())))
        out.append(tuple(sorted(prof)))
    return out


def _match_rows_cols(a: Grid, b: Grid) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Find p, q with b[p[i]][q[j]] == a[i][j], or None."""
    n = len(a)
    fa, fb = _row_fingerprints(a), _row_fingerprints(b)
    if sorted(fa) != sorted(fb):
        return None
    candidates = [[k for k in range(n) if fb[k] == fa[i]] for i in range(n)]
    p = [-1] * n
    taken = [False] * n
    sig_a = [0] * n
    sig_b = [0] * n
    base = max(max(row) for row in a) + 1

    def rec(i: int) -> bool:
        if i == n:
            return True
        for k in candidates[i]:
            if taken[k]:
                continue
            new_a = [s * base + x for s, x in zip(sig_a, a[i])]
            new_b = [s * base + x for s, x in zip(sig_b, b[k])]
            if sorted(new_a) != sorted(new_b):
                continue
            old_a, old_b = sig_a[:], sig_b[:]
            sig_a[:], sig_b[:] = new_a, new_b
            taken[k] = True
            p[i] = k
            if rec(i + 1):
                return True
            taken[k] = False
            sig_a[:], sig_b[:] = old_a, old_b
        return False

    if not rec(0):
        return None
    # columns with equal full signatures are interchangeable
    pool: dict[int, list[int]] = {}
    for j in range(n):
        pool.setdefault(sig_b[j], []).append(j)
    q = [0] * n
    for j in range(n):
        q[j] = pool[sig_a[j]].pop(0)
    return tuple(p), tuple(q)


def are_equivalent(a: FrequencySquare, b: FrequencySquare) -> EquivalenceCertificate | None:
    """A certificate mapping ``a`` onto ``b``, or None if they are inequivalent.

    Tries both transpose flags and every symbol permutation, then matches rows
    by backtracking with column-signature pruning.
    """
    if (a.n, a.m, a.lam) != (b.n, b.m, b.lam):
        raise ShapeMismatch(
            f"cannot compare F({a.n}; {a.lam}^{a.m}) with F({b.n}; {b.lam}^{b.m})"
        )
    n, m = a.n, a.m
    ident = tuple(range(n))
    for transposed in (False, True):
        for sym in permutations(range(m)):
            pre = Transform(ident, ident, tuple(sym), transposed)
            moved = transform_grid(a.grid, pre)
            hit = _match_rows_cols(moved, b.grid)
            if hit is None:
                continue
            p, q = hit
            cert = EquivalenceCertificate(Transform(p, q, tuple(sym), transposed))
            if cert.replay(a).grid != b.grid:  # pragma: no cover
                raise RuntimeError("certificate failed to replay")
            return cert
    return None


def _has_pattern(square: FrequencySquare) -> bool:
    from .search import find_pattern_2x2

    return any(find_pattern_2x2(square, e) is not None for e in (1, 2))


def is_equivalent_to_A(square: FrequencySquare) -> EquivalenceCertificate | None:
    """Certificate mapping the square onto A_{2 lam}, or None.

    Squares equivalent to A_{2 lam} are exactly those with two complementary
    row contents, each repeated lam times; the certificate puts one content on
    top and sorts its 1's to the left.  The answer is cross-checked against the
    absence of any e,e/e,f subarray.
    """
    if square.m != 2:
        raise WrongSymbolCount(f"expected m = 2, got m = {square.m}")
    n, lam = square.n, square.lam
    g = square.grid
    top = g[0]
    cert = None
    if all(row == top or all(x != y for x, y in zip(row, top)) for row in g):
        upper = [r for r in range(n) if g[r] == top]
        if len(upper) == lam:
            lower = [r for r in range(n) if g[r] != top]
            p = [0] * n
            for pos, r in enumerate(upper + lower):
                p[r] = pos
            ones = [c for c in range(n) if top[c] == 1]
            twos = [c for c in range(n) if top[c] == 2]
            q = [0] * n
            for pos, c in enumerate(ones + twos):
                q[c] = pos
            cert = EquivalenceCertificate(Transform(tuple(p), tuple(q), (0, 1), False))
            if cert.replay(square).grid != make_A(lam).grid:  # pragma: no cover
                raise RuntimeError("A-certificate failed to replay")
    if (cert is None) != _has_pattern(square):  # pragma: no cover
        raise RuntimeError("A-equivalence disagrees with the subarray test")
    return cert


def _lexmin_rows(grid: Grid, best: list | None) -> list[tuple[int, ...]]:
    """Lexicographically least grid reachable by row and column permutations.

    Rows are chosen one at a time; the columns form an ordered partition
    refined by each chosen row, and a row's best image sorts its entries inside
    every part.  All rows tying for the least image are branched on, except
    that identical rows are only tried once.
    """
    n = len(grid)
    best_rows: list[tuple[int, ...]] = [] if best is None else best

    def image(row: tuple[int, ...], parts: list[list[int]]) -> tuple[tuple[int, ...], list[list[int]]]:
        out: list[int] = []
        new_parts: list[list[int]] = []
        for part in parts:
            vals = sorted(part, key=lambda c: row[c])
            out.extend(row[c] for c in vals)
            group: list[int] = []
            for c in vals:
                if group and row[group[0]] != row[c]:
                    new_parts.append(group)
                    group = []
                group.append(c)
            new_parts.append(group)
        return tuple(out), new_parts

    # state: best prefix of images; whether current branch equals best so far
    def rec(depth: int, remaining: list[int], parts: list[list[int]], prefix: list) -> None:
        if depth == n:
            if not best_rows or prefix < best_rows:
                best_rows[:] = prefix
            return
        seen = set()
        options = []
        for r in remaining:
            if grid[r] in seen:
                continue
            seen.add(grid[r])
            img, new_parts = image(grid[r], parts)
            options.append((img, r, new_parts))
        least = min(o[0] for o in options)
        if best_rows and len(best_rows) > depth:
            cmp_prefix = prefix + [least]
            if cmp_prefix > best_rows[: depth + 1]:
                return
            if cmp_prefix < best_rows[: depth + 1]:
                del best_rows[:]
        for img, r, new_parts in options:
            if img != least:
                continue
            rest = list(remaining)
            rest.remove(r)
            rec(depth + 1, rest, new_parts, prefix + [img])

    rec(0, list(range(n)), [list(range(n))], [])
    return best_rows


def canonical_key(square: FrequencySquare) -> bytes:
    """Bytes equal for two squares iff they are equivalent.

    The key is (n, m, lam) followed by the least grid, in row-major order, over
    the whole equivalence group.
    """
    if square.n > CANONICAL_MAX_N:
        raise TooLarge(f"canonical_key supports n <= {CANONICAL_MAX_N}")
    n, m = square.n, square.m
    ident = tuple(range(n))
    best: list = []
    for transposed in (False, True):
        for sym in permutations(range(m)):
            g = transform_grid(square.grid, Transform(ident, ident, tuple(sym), transposed))
            _lexmin_rows(g, best)
    flat = [x for row in best for x in row]
    return bytes([n, m, square.lam]) + bytes(flat)


def orbit(square: FrequencySquare) -> set[Grid]:
    """All grids equivalent to ``square``, by closure under the generators
    (adjacent row/column/symbol transpositions and the transpose)."""
    n, m = square.n, square.m
    ident, sid = tuple(range(n)), tuple(range(m))
    gens = [Transform(ident, ident, sid, True)]
    for i in range(n - 1):
        sw = list(ident)
        sw[i], sw[i + 1] = sw[i + 1], sw[i]
        gens.append(Transform(tuple(sw), ident, sid, False))
        gens.append(Transform(ident, tuple(sw), sid, False))
    for i in range(m - 1):
        sw = list(sid)
        sw[i], sw[i + 1] = sw[i + 1], sw[i]
        gens.append(Transform(ident, ident, tuple(sw), False))
    seen = {square.grid}
    frontier = [square.grid]
    while frontier:
        nxt = []
        for g in frontier:
            for t in gens:
                h = transform_grid(g, t)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen
