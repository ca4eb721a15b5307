"""Named squares, derived squares and a seeded sampler for test inputs."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import Diagonal, FrequencySquare, Kind, PlexSelection, validate
from .errors import (
    DivisibilityViolation,
    EntryMismatch,
    LengthMismatch,
    NotADivisor,
    NotAPlex,
    OddOrder,
)
from .plex import checked_plex, decompose_plex


def make_A(lam: int) -> FrequencySquare:
    """F(2*lam; lam, lam) with 1-blocks on the two main-diagonal quadrants."""
    if lam < 1:
        raise ValueError("lambda must be positive")
    n = 2 * lam
    grid = tuple(
        tuple(1 if (r < lam) == (c < lam) else 2 for c in range(n)) for r in range(n)
    )
    return FrequencySquare(n, 2, lam, grid)


def make_B(n: int) -> FrequencySquare:
    """Addition table of Z_n, written with symbols 1..n (0 shown as n)."""
    if n < 1:
        raise ValueError("n must be positive")
    # 1-based (i, j) holds i + j mod n with 0 -> n
    grid = tuple(tuple((i + j + 1) % n + 1 for j in range(n)) for i in range(n))
    return FrequencySquare(n, n, 1, grid)


def blow_up(square: FrequencySquare, lam: int) -> FrequencySquare:
    """Replace every cell by a lam x lam block of its entry.

    Also accepts non-Latin input: F(m*mu; mu^m) becomes F(m*mu*lam; (mu*lam)^m).
    """
    if lam < 1:
        raise ValueError("lambda must be positive")
    grid = tuple(
        tuple(x for x in row for _ in range(lam)) for row in square.grid for _ in range(lam)
    )
    return FrequencySquare(square.n * lam, square.m, square.lam * lam, grid)


def make_B_blown(n: int, lam: int) -> FrequencySquare:
    return blow_up(make_B(n), lam)


def merge_symbols(square: FrequencySquare, alpha: int) -> FrequencySquare:
    """Coarsen symbols by e -> ceil(e / alpha)."""
    if alpha < 1 or square.m % alpha:
        raise NotADivisor(f"{alpha} does not divide m={square.m}")
    grid = tuple(tuple((x + alpha - 1) // alpha for x in row) for row in square.grid)
    return FrequencySquare(square.n, square.m // alpha, square.lam * alpha, grid)


@dataclass(frozen=True)
class DeltaValue:
    value: int
    modulus: int

    @property
    def residue(self) -> int:
        return self.value % self.modulus


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def delta_value(n: int, lam: int, r: int, c: int, e: int) -> DeltaValue:
    """ceil(r/lam) + ceil(c/lam) - e for the 1-based cell (r, c) of B_n(lam)."""
    if not (1 <= r <= n * lam and 1 <= c <= n * lam):
        raise ValueError(f"cell ({r},{c}) outside the {n * lam}x{n * lam} grid")
    br, bc = _ceil_div(r, lam), _ceil_div(c, lam)
    true_e = (br + bc) % n or n
    if e != true_e:
        raise EntryMismatch(f"B_{n}({lam}) has entry {true_e} at ({r},{c}), not {e}")
    return DeltaValue(br + bc - e, n)


@dataclass(frozen=True)
class DeltaSum:
    """Delta summed over a diagonal of B_n(lam).

    ``raw`` is the integer sum and ``residue`` its value mod n (always 0).
    ``balanced_closed_form`` is what ``raw`` must equal if the diagonal were
    balanced (each block index summed lam times, minus each symbol lam times);
    its residue is n/2 whenever n is even and lam odd.
    """

    raw: int
    residue: int
    modulus: int
    balanced_closed_form: int

    @property
    def closed_form_residue(self) -> int:
        return self.balanced_closed_form % self.modulus


def delta_diagonal_sum(n: int, lam: int, d: Diagonal) -> DeltaSum:
    size = n * lam
    if len(d.sigma) != size:
        raise LengthMismatch(f"diagonal has length {len(d.sigma)}, expected {size}")
    raw = 0
    for r0, c0 in enumerate(d.sigma):
        br, bc = r0 // lam + 1, c0 // lam + 1
        e = (br + bc) % n or n
        raw += br + bc - e
    closed = lam * n * (n + 1) // 2
    return DeltaSum(raw, raw % n, n, closed)


def plex_to_balanced_diagonal(
    square: FrequencySquare, plex: PlexSelection, lam: int
) -> Diagonal:
    """Balanced diagonal of ``blow_up(square, lam)`` built from a k-plex.

    The plex is split into k diagonals; a cell (r, c) of the i-th one claims
    the block cells at offsets j in the i-th window of width lam/k along the
    main diagonal of block (r, c).
    """
    if square.kind is not Kind.LATIN:
        raise NotAPlex("plexes are defined on Latin squares only")
    checked_plex(square, plex)
    k = plex.k
    if lam < 1 or lam % k:
        raise DivisibilityViolation(f"k={k} does not divide lambda={lam}")
    alpha = lam // k
    sigma = [0] * (square.n * lam)
    for i, part in enumerate(decompose_plex(plex, square.n)):
        for r, c in enumerate(part.sigma):
            for j in range(i * alpha, (i + 1) * alpha):
                sigma[lam * r + j] = lam * c + j
    return Diagonal(tuple(sigma))


def two_plex_of_B(n: int) -> PlexSelection:
    """Main diagonal plus the cyclic superdiagonal (r, r+1) of B_n, n even."""
    if n < 2 or n % 2:
        raise OddOrder(f"n={n} must be even")
    cells = frozenset((r, r) for r in range(n)) | frozenset((r, (r + 1) % n) for r in range(n))
    return checked_plex(make_B(n), PlexSelection(cells, 2))


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    steps: int = 0

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ValueError("steps must be non-negative")


def _cycle_switch(g: list[list[int]], rng: random.Random, n: int) -> bool:
    """Exchange two random rows (or columns) on a random closed set of cells.

    Columns where the two lines differ are edges e -> f of a directed graph on
    symbols; it is Eulerian because both lines hold the same multiset.  A
    closed trail is a column set on which swapping the two lines keeps every
    frequency, and a 2-cycle is an ordinary intercalate.
    """
    r, r2 = rng.sample(range(n), 2)
    by_cols = rng.random() < 0.5
    if by_cols:
        a = [g[i][r] for i in range(n)]
        b = [g[i][r2] for i in range(n)]
    else:
        a, b = g[r], g[r2]
    diff = [c for c in range(n) if a[c] != b[c]]
    if not diff:
        return False
    first = rng.choice(diff)
    trail = [first]
    unused = set(diff)
    unused.discard(first)
    node = b[first]
    while node != a[first]:
        nxt = rng.choice(sorted(c for c in unused if a[c] == node))
        unused.discard(nxt)
        trail.append(nxt)
        node = b[nxt]
    for c in trail:
        if by_cols:
            g[c][r], g[c][r2] = g[c][r2], g[c][r]
        else:
            g[r][c], g[r2][c] = g[r2][c], g[r][c]
    return True


def switch_chain(square: FrequencySquare, steps: int, rng: random.Random) -> FrequencySquare:
    """Apply ``steps`` random row or column cycle switches.

    Plain intercalate swaps alone get stuck: B_m(lam) with m odd has no
    a,b/b,a subarray at all.
    """
    n = square.n
    g = [list(row) for row in square.grid]
    if n >= 2:
        for _ in range(steps):
            _cycle_switch(g, rng, n)
    return FrequencySquare(n, square.m, square.lam, tuple(tuple(row) for row in g))


def random_square(m: int, lam: int, cfg: SamplerConfig = SamplerConfig()) -> FrequencySquare:
    """Seeded F(m*lam; lam^m) from the switch chain started at B_m(lam)."""
    if m < 1 or lam < 1:
        raise ValueError("m and lambda must be positive")
    rng = random.Random(cfg.seed)
    return switch_chain(blow_up(make_B(m), lam), cfg.steps, rng)


def parse_named(spec: str) -> FrequencySquare:
    """Build a square from a name such as ``A:3``, ``B:4``, ``B:4x2`` or
    ``rand:<m>:<lambda>:<seed>[:steps]`` (steps default to 50*n)."""
    head, _, rest = spec.partition(":")
    try:
        if head == "A":
            return make_A(int(rest))
        if head == "B":
            if "x" in rest:
                n, lam = rest.split("x")
                return make_B_blown(int(n), int(lam))
            return make_B(int(rest))
        if head == "rand":
            parts = [int(x) for x in rest.split(":")]
            if len(parts) not in (3, 4):
                raise ValueError
            m, lam, seed = parts[:3]
            steps = parts[3] if len(parts) == 4 else 50 * m * lam
            return random_square(m, lam, SamplerConfig(seed, steps))
    except ValueError:
        pass
    raise ValueError(f"unrecognised square name {spec!r}")


def revalidate(square: FrequencySquare) -> FrequencySquare:
    return validate(square.grid, square.m, square.lam)
