"""Exhaustive and sampled verification runs producing structured reports."""

from __future__ import annotations

import enum
import json
import random
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from math import factorial, prod
from typing import Any, Callable, Iterator

from .constructions import (
    delta_diagonal_sum,
    delta_value,
    switch_chain,
    make_A,
    make_B_blown,
)
from .core import Diagonal, FrequencySquare, validate
from .equivalence import canonical_key, is_equivalent_to_A, orbit
from .errors import ParityPreconditionFailed, TooLarge
from .search import Status, constructive_m2, find_balanced, find_exact

EXHAUSTIVE_MAX_N = 6
EXACT_MAX_N = 12
SUBARRAY_MAX_LAMBDA = 2
# row classes the F(6;2,2,2) enumeration may yield before falling back to sampling
M3_ENUMERATION_BUDGET = 50_000_000
DEFAULT_SEED = 20190101


class Mode(enum.Enum):
    EXHAUSTIVE = "Exhaustive"
    SAMPLED = "Sampled"


@dataclass
class VerificationReport:
    target: str
    parameters: dict[str, Any]
    mode: Mode
    total_checked: int = 0
    violations: list[dict[str, Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)
    elapsed_s: float = 0.0
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": self.target,
            "parameters": self.parameters,
            "mode": self.mode.value,
            "totalChecked": self.total_checked,
            "violations": self.violations,
            "summary": self.summary,
            "elapsed_s": round(self.elapsed_s, 3),
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.parameters.items())
        lines = [
            f"target      {self.target}",
            f"parameters  {params}",
            f"mode        {self.mode.value}",
            f"checked     {self.total_checked}",
            f"violations  {len(self.violations)}",
        ]
        if self.seed is not None:
            lines.append(f"seed        {self.seed}")
        for k, v in self.summary.items():
            if k == "rows":
                continue
            lines.append(f"{k:<11} {v}")
        rows = self.summary.get("rows")
        if rows:
            header = list(rows[0])
            lines.append("")
            lines.append("  ".join(f"{h:>10}" for h in header))
            for row in rows:
                lines.append("  ".join(f"{str(row[h]):>10}" for h in header))
        lines.append(f"result      {'HOLDS' if self.ok else 'VIOLATED'}")
        return "\n".join(lines) + "\n"


# --- enumeration -----------------------------------------------------------


def _row_patterns(m: int, lam: int) -> list[tuple[int, ...]]:
    base = [s for s in range(1, m + 1) for _ in range(lam)]
    return sorted(set(permutations(base)))


def _guard(m: int, lam: int, limit: int, force: bool) -> None:
    if m * lam > limit and not force:
        raise TooLarge(f"m*lambda = {m * lam} exceeds the guard {limit}")


def enumerate_squares(m: int, lam: int, force: bool = False) -> Iterator[FrequencySquare]:
    """Every F(m*lam; lam^m), each once, in lexicographic order of rows.

    Candidate rows are tried in lexicographic order while per-column symbol
    budgets are maintained.
    """
    _guard(m, lam, EXHAUSTIVE_MAX_N, force)
    yield from _enumerate(m, lam, sorted_rows=False)


def enumerate_row_classes(
    m: int, lam: int, force: bool = False
) -> Iterator[tuple[FrequencySquare, int]]:
    """Squares with rows in nondecreasing lexicographic order, each paired
    with the number of distinct labelled squares obtained by permuting its
    rows.  The multiplicities sum to the labelled count."""
    _guard(m, lam, EXHAUSTIVE_MAX_N, force)
    n = m * lam
    for sq in _enumerate(m, lam, sorted_rows=True):
        reps = defaultdict(int)
        for row in sq.grid:
            reps[row] += 1
        yield sq, factorial(n) // prod(factorial(v) for v in reps.values())


def _enumerate(m: int, lam: int, sorted_rows: bool) -> Iterator[FrequencySquare]:
    n = m * lam
    rows = _row_patterns(m, lam)
    # column budget: left[c][s] occurrences of symbol s still allowed in column c
    left = [[lam] * (m + 1) for _ in range(n)]
    chosen: list[tuple[int, ...]] = []

    def rec(start: int) -> Iterator[FrequencySquare]:
        if len(chosen) == n:
            yield FrequencySquare(n, m, lam, tuple(chosen))
            return
        for idx in range(start if sorted_rows else 0, len(rows)):
            row = rows[idx]
            if any(left[c][x] == 0 for c, x in enumerate(row)):
                continue
            for c, x in enumerate(row):
                left[c][x] -= 1
            chosen.append(row)
            yield from rec(idx)
            chosen.pop()
            for c, x in enumerate(row):
                left[c][x] += 1

    yield from rec(0)


def count_squares(m: int, lam: int) -> int:
    """Count F(m*lam; lam^m) by a transfer over rows whose state is the
    vector of per-column symbol counts.  Independent of the enumerators."""
    n = m * lam
    rows = _row_patterns(m, lam)
    states: dict[tuple, int] = {tuple([(0,) * m] * n): 1}
    for _ in range(n):
        nxt: dict[tuple, int] = defaultdict(int)
        for st, ways in states.items():
            for row in rows:
                cols = []
                for col, x in zip(st, row):
                    if col[x - 1] == lam:
                        break
                    col = list(col)
                    col[x - 1] += 1
                    cols.append(tuple(col))
                else:
                    nxt[tuple(cols)] += ways
        states = nxt
    return sum(states.values())


def a_orbit_size(lam: int) -> int:
    """Number of labelled squares equivalent to A_{2 lam}, by closure."""
    return len(orbit(make_A(lam)))


# --- helpers ----------------------------------------------------------------


def _derived_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


def _sample(m: int, lam: int, seed: int, index: int) -> FrequencySquare:
    n = m * lam
    rng = _derived_rng(seed, index)
    return switch_chain(make_B_blown(m, lam), 50 * n, rng)


def _recheck_absent(grid: list[list[int]], m: int, lam: int) -> bool:
    """Re-validate a stored counterexample grid and confirm it has no
    balanced diagonal."""
    sq = validate(grid, m, lam)
    return find_exact(sq).status is Status.PROVED_ABSENT


def _map(fn: Callable, items: list, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (workers * 8))))


# --- m = 2 -------------------------------------------------------------------


def _m2_record(square: FrequencySquare) -> tuple[bool, bool, bool]:
    exists = find_exact(square).found
    eq_a = is_equivalent_to_A(square) is not None
    res = constructive_m2(square)
    return exists, eq_a, res.witness is not None


def check_theorem_m2(lam: int, workers: int = 1, force: bool = False) -> VerificationReport:
    """All F(2 lam; lam, lam): a balanced diagonal exists iff lam is even or
    the square is not equivalent to A_{2 lam}; the constructive algorithm must
    agree, and the number of A-equivalent squares must equal the orbit size."""
    t0 = time.perf_counter()
    _guard(2, lam, EXHAUSTIVE_MAX_N, force)
    squares = list(enumerate_squares(2, lam, force))
    records = _map(_m2_record, squares, workers)
    rep = VerificationReport("m2", {"lambda": lam}, Mode.EXHAUSTIVE)
    absent = eq_count = 0
    for sq, (exists, eq_a, constructive) in zip(squares, records):
        rep.total_checked += 1
        absent += not exists
        eq_count += eq_a
        expected = lam % 2 == 0 or not eq_a
        if exists != expected or constructive != exists:
            rep.violations.append(
                {
                    "grid": sq.to_lists(),
                    "balanced": exists,
                    "equivalentToA": eq_a,
                    "constructive": constructive,
                }
            )
    orbit_size = a_orbit_size(lam)
    rep.summary = {
        "enumerated": rep.total_checked,
        "independent_count": count_squares(2, lam),
        "without_balanced": absent,
        "a_equivalent": eq_count,
        "a_orbit_size": orbit_size,
    }
    if eq_count != orbit_size:
        rep.violations.append({"reason": f"A-equivalent count {eq_count} != orbit {orbit_size}"})
    if rep.total_checked != rep.summary["independent_count"]:
        rep.violations.append({"reason": "enumeration count mismatch"})
    rep.elapsed_s = time.perf_counter() - t0
    return rep


# --- exhaustive / sampled existence checks ------------------------------------


def _sampled_status(args: tuple[int, int, int, int]) -> tuple[int, Status, list[list[int]]]:
    m, lam, seed, index = args
    sq = _sample(m, lam, seed, index)
    return index, find_balanced(sq, seed=index).status, sq.to_lists()


def _class_status(sq: FrequencySquare) -> Status:
    return find_balanced(sq).status


def _existence_run(
    target: str,
    m: int,
    lam: int,
    exhaustive: bool,
    samples: int,
    seed: int,
    workers: int,
    enumeration_budget: int | None = None,
) -> VerificationReport:
    t0 = time.perf_counter()
    rep = VerificationReport(target, {"m": m, "lambda": lam}, Mode.SAMPLED)
    counterexamples: list[list[list[int]]] = []
    unknown = 0
    if exhaustive:
        classes = []
        nodes = 0
        for sq, mult in enumerate_row_classes(m, lam, force=True):
            classes.append((sq, mult))
            nodes += 1
            if enumeration_budget is not None and nodes > enumeration_budget:
                classes = None
                break
        if classes is not None:
            rep.mode = Mode.EXHAUSTIVE
            statuses = _map(_class_status, [sq for sq, _ in classes], workers)
            for (sq, mult), st in zip(classes, statuses):
                rep.total_checked += mult
                if st is Status.PROVED_ABSENT:
                    counterexamples.append(sq.to_lists())
                elif st is Status.UNKNOWN:
                    unknown += 1
            rep.summary["row_classes"] = len(classes)
            rep.summary["independent_count"] = count_squares(m, lam)
            if rep.summary["independent_count"] != rep.total_checked:
                rep.violations.append({"reason": "enumeration count mismatch"})
    if rep.mode is Mode.SAMPLED:
        rep.seed = seed
        jobs = [(m, lam, seed, i) for i in range(samples)]
        for _, st, grid in _map(_sampled_status, jobs, workers):
            rep.total_checked += 1
            if st is Status.PROVED_ABSENT:
                counterexamples.append(grid)
            elif st is Status.UNKNOWN:
                unknown += 1
    for grid in counterexamples:
        if _recheck_absent(grid, m, lam):
            sq = validate(grid, m, lam)
            key = canonical_key(sq).hex() if sq.n <= 12 else None
            rep.violations.append({"grid": grid, "status": "ProvedAbsent", "canonicalKey": key})
    rep.summary["unknown"] = unknown
    if unknown:
        rep.violations.append({"reason": f"{unknown} squares left undecided"})
    rep.elapsed_s = time.perf_counter() - t0
    return rep


def check_theorem_m3(
    lam: int,
    samples: int = 10_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    enumeration_budget: int = M3_ENUMERATION_BUDGET,
) -> VerificationReport:
    """Every F(3 lam; lam, lam, lam) has a balanced diagonal.

    lam = 1 and lam = 2 run over all squares up to row order (row order does
    not affect existence), lam >= 3 over seeded samples.
    """
    if lam > 3:
        raise TooLarge("check_theorem_m3 supports lambda <= 3")
    exhaustive = 3 * lam <= EXHAUSTIVE_MAX_N
    return _existence_run("m3", 3, lam, exhaustive, samples, seed, workers, enumeration_budget)


def check_conjecture(
    m: int, lam: int, samples: int = 1_000, seed: int = DEFAULT_SEED, workers: int = 1
) -> VerificationReport:
    """Look for F(m lam; lam^m) squares with (m-1) lam even and no balanced
    diagonal.  Counterexamples are recorded with grid and canonical key."""
    if ((m - 1) * lam) % 2:
        raise ParityPreconditionFailed(f"(m-1)*lambda = {(m - 1) * lam} is odd")
    if m * lam > EXACT_MAX_N:
        raise TooLarge(f"m*lambda = {m * lam} exceeds {EXACT_MAX_N}")
    exhaustive = m * lam <= EXHAUSTIVE_MAX_N
    return _existence_run("conjecture", m, lam, exhaustive, samples, seed, workers)


# --- B_n(lambda) ---------------------------------------------------------------


def _random_diagonal(n: int, rng: random.Random) -> Diagonal:
    sigma = list(range(n))
    rng.shuffle(sigma)
    return Diagonal(tuple(sigma))


def check_B_theorem(
    n_max: int,
    lambda_max: int,
    diagonals: int = 1_000,
    seed: int = DEFAULT_SEED,
    max_order: int = EXACT_MAX_N,
    force: bool = False,
) -> VerificationReport:
    """For every pair with n*lam <= max_order: B_n(lam) has a balanced
    diagonal iff (n-1) lam is even, every cell's Delta is 0 mod n, and random
    diagonals have Delta-sum 0 mod n."""
    if max_order > EXACT_MAX_N and not force:
        raise TooLarge(f"max_order {max_order} exceeds {EXACT_MAX_N}")
    t0 = time.perf_counter()
    rep = VerificationReport(
        "bgrid", {"nmax": n_max, "lmax": lambda_max}, Mode.EXHAUSTIVE, seed=seed
    )
    rows = []
    for n in range(1, n_max + 1):
        for lam in range(1, lambda_max + 1):
            if n * lam > max_order:
                continue
            sq = make_B_blown(n, lam)
            out = find_balanced(sq, seed=seed)
            expected = ((n - 1) * lam) % 2 == 0
            cells_ok = all(
                delta_value(n, lam, r + 1, c + 1, sq.grid[r][c]).residue == 0
                for r in range(sq.n)
                for c in range(sq.n)
            )
            rng = _derived_rng(seed, n * 1000 + lam)
            sums_ok = all(
                delta_diagonal_sum(n, lam, _random_diagonal(sq.n, rng)).residue == 0
                for _ in range(diagonals)
            )
            found = out.status is Status.FOUND
            decided = out.status is not Status.UNKNOWN
            rep.total_checked += 1
            rows.append(
                {
                    "n": n,
                    "lambda": lam,
                    "status": out.status.value,
                    "parity_even": expected,
                    "delta_cells": "ok" if cells_ok else "FAIL",
                    "delta_sums": "ok" if sums_ok else "FAIL",
                }
            )
            if not decided or found != expected or not cells_ok or not sums_ok:
                rep.violations.append(dict(rows[-1]))
    rep.summary["rows"] = rows
    rep.elapsed_s = time.perf_counter() - t0
    return rep


# --- subarray bound --------------------------------------------------------------


def max_missing_subarray(square: FrequencySquare, symbol: int) -> int:
    """Largest k such that some k x k subarray avoids ``symbol``."""
    n = square.n
    col_has = [0] * n  # per row, mask of columns holding the symbol
    for r, row in enumerate(square.grid):
        col_has[r] = sum(1 << c for c, x in enumerate(row) if x == symbol)
    best = 0
    for rows in range(1, 1 << n):
        k = bin(rows).count("1")
        if k <= best:
            continue
        blocked = 0
        for r in range(n):
            if rows >> r & 1:
                blocked |= col_has[r]
        free = n - bin(blocked).count("1")
        best = max(best, min(k, free))
    return best


def check_subarray_bound(square: FrequencySquare, force: bool = False) -> VerificationReport:
    """No k x k subarray of an F(3 lam; lam^3) misses a symbol when k > 3 lam / 2."""
    if square.m != 3:
        raise ValueError("check_subarray_bound needs m = 3")
    if square.lam > SUBARRAY_MAX_LAMBDA and not force:
        raise TooLarge(f"lambda = {square.lam} exceeds {SUBARRAY_MAX_LAMBDA}")
    t0 = time.perf_counter()
    bound = 3 * square.lam // 2
    rep = VerificationReport("subarray-bound", {"lambda": square.lam}, Mode.EXHAUSTIVE)
    per_symbol = {}
    for s in range(1, 4):
        k = max_missing_subarray(square, s)
        per_symbol[s] = k
        rep.total_checked += 1
        if k > bound:
            rep.violations.append({"grid": square.to_lists(), "symbol": s, "k": k, "bound": bound})
    rep.summary = {"bound": bound, "max_k": max(per_symbol.values()), "per_symbol": per_symbol}
    rep.elapsed_s = time.perf_counter() - t0
    return rep


def check_subarray_bound_sampled(
    lam: int, samples: int, seed: int = DEFAULT_SEED
) -> VerificationReport:
    t0 = time.perf_counter()
    rep = VerificationReport(
        "subarray-bound", {"lambda": lam}, Mode.SAMPLED, seed=seed
    )
    worst = 0
    for i in range(samples):
        sub = check_subarray_bound(_sample(3, lam, seed, i))
        rep.total_checked += 1
        worst = max(worst, sub.summary["max_k"])
        rep.violations.extend(sub.violations)
    rep.summary = {"bound": 3 * lam // 2, "max_k": worst}
    rep.elapsed_s = time.perf_counter() - t0
    return rep


__all__ = [
    "Mode",
    "VerificationReport",
    "a_orbit_size",
    "check_B_theorem",
    "check_conjecture",
    "check_subarray_bound",
    "check_subarray_bound_sampled",
    "check_theorem_m2",
    "check_theorem_m3",
    "count_squares",
    "enumerate_row_classes",
    "enumerate_squares",
    "max_missing_subarray",
]
