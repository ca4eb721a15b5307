"""Property checks shared by the unit tests and the acceptance run.

Each ``check_*`` returns a list of failure descriptions (empty means the
property held on every generated case).  Naive oracles here never call the
search code they are checking.
"""

from __future__ import annotations

import random
from collections import Counter
from itertools import permutations

from freqsq import formats
from freqsq.cli import run
from freqsq.constructions import (
    SamplerConfig,
    blow_up,
    delta_value,
    make_A,
    make_B,
    merge_symbols,
    plex_to_balanced_diagonal,
    random_square,
)
from freqsq.core import (
    Diagonal,
    FrequencySquare,
    Transform,
    apply_transform,
    diagonal_counts,
    is_balanced,
    map_diagonal,
    validate,
)
from freqsq.equivalence import are_equivalent, canonical_key
from freqsq.plex import decompose_plex, find_k_plex
from freqsq.search import (
    DiagonalState,
    Status,
    all_moves,
    constructive_m2,
    find_balanced,
    find_exact,
    swap_descent,
)
from freqsq.verify import check_conjecture, check_theorem_m3

SEED = 20190101


# --- oracles -------------------------------------------------------------------


def naive_has_balanced(sq: FrequencySquare) -> bool:
    g, lam = sq.grid, sq.lam
    for sigma in permutations(range(sq.n)):
        counts = Counter(g[r][c] for r, c in enumerate(sigma))
        if all(counts[s] == lam for s in range(1, sq.m + 1)):
            return True
    return False


def naive_balanced_set(sq: FrequencySquare) -> set[tuple[int, ...]]:
    out = set()
    for sigma in permutations(range(sq.n)):
        counts = Counter(sq.grid[r][c] for r, c in enumerate(sigma))
        if all(counts[s] == sq.lam for s in range(1, sq.m + 1)):
            out.add(sigma)
    return out


def naive_is_frequency_square(grid, m: int, lam: int) -> bool:
    n = len(grid)
    if n != m * lam or any(len(row) != n for row in grid):
        return False
    for i in range(n):
        row = [grid[i][j] for j in range(n)]
        col = [grid[j][i] for j in range(n)]
        for s in range(1, m + 1):
            if row.count(s) != lam or col.count(s) != lam:
                return False
        if any(x < 1 or x > m for x in row):
            return False
    return True


# --- generators ------------------------------------------------------------------


def rand_square(rng: random.Random, max_n: int = 6, latin: bool = False) -> FrequencySquare:
    while True:
        m = rng.randint(1, max_n)
        lam = 1 if latin else rng.randint(1, max_n)
        if m * lam <= max_n and (not latin or m >= 1):
            break
    n = m * lam
    sq = random_square(m, lam, SamplerConfig(rng.randrange(2**32), 50 * n))
    t = rand_transform(rng, n, m)
    return apply_transform(sq, t)


def rand_perm(rng: random.Random, size: int) -> tuple[int, ...]:
    p = list(range(size))
    rng.shuffle(p)
    return tuple(p)


def rand_transform(rng: random.Random, n: int, m: int) -> Transform:
    return Transform(rand_perm(rng, n), rand_perm(rng, n), rand_perm(rng, m), rng.random() < 0.5)


def rand_latin(rng: random.Random, order: int) -> FrequencySquare:
    sq = random_square(order, 1, SamplerConfig(rng.randrange(2**32), 50 * order))
    return apply_transform(sq, rand_transform(rng, order, order))


# --- fsq-core ----------------------------------------------------------------------


def check_transform_round_trip(cases: int = 1000, seed: int = SEED) -> list[str]:
    rng = random.Random(seed)
    bad = []
    for i in range(cases):
        sq = rand_square(rng)
        t = rand_transform(rng, sq.n, sq.m)
        back = apply_transform(apply_transform(sq, t), t.inverse())
        if back.grid != sq.grid:
            bad.append(f"case {i}: round trip failed")
    return bad


def check_balance_transport(cases: int = 1000, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 1)
    bad = []
    for i in range(cases):
        sq = rand_square(rng)
        # mix random diagonals with known balanced ones so both outcomes occur
        out = find_exact(sq) if rng.random() < 0.5 else None
        d = out.witness if out is not None and out.witness else Diagonal(rand_perm(rng, sq.n))
        t = rand_transform(rng, sq.n, sq.m)
        if is_balanced(sq, d) != is_balanced(apply_transform(sq, t), map_diagonal(d, t)):
            bad.append(f"case {i}: balance not transported")
        if sum(diagonal_counts(sq, d).counts.values()) != sq.n:
            bad.append(f"case {i}: counts do not sum to n")
    return bad


def check_validate_matches_recount(cases: int = 2000, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 2)
    bad = []
    for i in range(cases):
        sq = rand_square(rng)
        grid = sq.to_lists()
        # perturb some of the time: a single cell change or a swap within a row
        kind = rng.randrange(3)
        if kind == 1 and sq.m > 1:
            r, c = rng.randrange(sq.n), rng.randrange(sq.n)
            grid[r][c] = rng.randint(1, sq.m + 1)
        elif kind == 2:
            r = rng.randrange(sq.n)
            a, b = rng.randrange(sq.n), rng.randrange(sq.n)
            grid[r][a], grid[r][b] = grid[r][b], grid[r][a]
        want = naive_is_frequency_square(grid, sq.m, sq.lam)
        try:
            validate(grid, sq.m, sq.lam)
            got = True
        except ValueError:
            got = False
        if got != want:
            bad.append(f"case {i}: validate={got} recount={want}")
    return bad


# --- constructions --------------------------------------------------------------------


def check_A_parity(max_lam: int = 3) -> list[str]:
    bad = []
    for lam in range(1, max_lam + 1):
        has = find_exact(make_A(lam)).found
        if has != (lam % 2 == 0):
            bad.append(f"A_{2 * lam}: balanced={has}")
    return bad


def check_delta_cells(max_n: int = 6, max_lam: int = 3) -> list[str]:
    bad = []
    for n in range(1, max_n + 1):
        for lam in range(1, max_lam + 1):
            sq = blow_up(make_B(n), lam)
            for r in range(sq.n):
                for c in range(sq.n):
                    dv = delta_value(n, lam, r + 1, c + 1, sq.grid[r][c])
                    if dv.value % n:
                        bad.append(f"B_{n}({lam}) cell ({r + 1},{c + 1}) Delta={dv.value}")
    return bad


def check_merge_transport(cases: int = 500, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 3)
    bad = []
    done = 0
    attempts = 0
    while done < cases:
        attempts += 1
        if attempts > 50 * cases:
            bad.append(f"only {done} Latin squares with a transversal found")
            break
        sq = rand_latin(rng, 6)
        out = find_exact(sq)
        if not out.found:
            continue
        done += 1
        for alpha in (2, 3):
            merged = merge_symbols(sq, alpha)
            validate(merged.grid, merged.m, merged.lam)
            if not is_balanced(merged, out.witness):
                bad.append(f"case {done}: alpha={alpha} transversal not balanced after merge")
    return bad


def check_blow_up(cases: int = 200, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 4)
    bad = []
    for i in range(cases):
        sq = rand_square(rng, max_n=4)
        lam = rng.randint(1, 3)
        big = blow_up(sq, lam)
        try:
            validate(big.grid, big.m, big.lam)
        except ValueError as exc:
            bad.append(f"case {i}: {exc}")
        if blow_up(sq, 1) != sq:
            bad.append(f"case {i}: blow_up(., 1) is not the identity")
    return bad


def random_plex_instance(rng: random.Random) -> tuple[FrequencySquare, object, int]:
    """Random Latin square of order <= 5 with some k-plex and a multiple of k <= 4."""
    while True:
        order = rng.randint(1, 5)
        sq = rand_latin(rng, order)
        k = rng.randint(1, min(order, 4))
        plex = find_k_plex(sq, k)
        if plex is None:
            continue
        lams = [lam for lam in range(1, 5) if lam % k == 0]
        return sq, plex, rng.choice(lams)


def check_plex_blow_up(cases: int = 100, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 5)
    bad = []
    for i in range(cases):
        sq, plex, lam = random_plex_instance(rng)
        d = plex_to_balanced_diagonal(sq, plex, lam)
        if not is_balanced(blow_up(sq, lam), d):
            bad.append(f"case {i}: order {sq.n}, k={plex.k}, lambda={lam}")
    return bad


# --- search ------------------------------------------------------------------------------


def check_exact_vs_naive(cases: int = 200, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 6)
    bad = []
    for i in range(cases):
        sq = rand_square(rng)
        out = find_exact(sq)
        if out.status is Status.UNKNOWN:
            bad.append(f"case {i}: unbudgeted search returned Unknown")
            continue
        if out.found != naive_has_balanced(sq):
            bad.append(f"case {i}: exact={out.status.value}")
        if out.found and not is_balanced(sq, out.witness):
            bad.append(f"case {i}: witness not balanced")
    return bad


def check_descent_soundness(cases: int = 200, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 7)
    bad = []
    for i in range(cases):
        sq = rand_square(rng)
        for out in (swap_descent(sq, seed=i, restarts=3), find_balanced(sq, seed=i)):
            if out.found and not is_balanced(sq, out.witness):
                bad.append(f"case {i}: unsound witness")
        if swap_descent(sq, seed=i, restarts=2).status is Status.PROVED_ABSENT:
            bad.append(f"case {i}: descent claimed absence")
    return bad


def check_incremental_objective(moves: int = 10_000, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 8)
    bad = []
    done = 0
    while done < moves:
        sq = rand_square(rng, max_n=9)
        if sq.n < 3:
            continue
        state = DiagonalState(sq, list(rand_perm(rng, sq.n)))
        pool = all_moves(sq.n, columns=True)
        for _ in range(100):
            mv = rng.choice(pool)
            before = state.objective
            predicted = state.delta(mv)
            state.apply(mv)
            full = state.recount()
            if full != before + predicted or state.objective != full:
                bad.append(f"move {mv}: predicted {predicted}, recount {full - before}")
            done += 1
    return bad


def check_m2_certificates(cases: int = 300, seed: int = SEED) -> list[str]:
    """Certificate replay on random A-equivalent inputs and random squares."""
    rng = random.Random(seed + 9)
    bad = []
    for i in range(cases):
        lam = rng.randint(1, 5)
        if i % 2:
            sq = apply_transform(make_A(lam), rand_transform(rng, 2 * lam, 2))
        else:
            sq = random_square(2, lam, SamplerConfig(rng.randrange(2**32), rng.randint(0, 40)))
        res = constructive_m2(sq)
        if res.certificate is not None:
            if apply_transform(sq, res.certificate.transform).grid != make_A(lam).grid:
                bad.append(f"case {i}: certificate does not replay")
        if res.witness is not None and not is_balanced(sq, res.witness):
            bad.append(f"case {i}: witness not balanced")
        if (res.witness is None) == (lam % 2 == 0 or res.certificate is None):
            bad.append(f"case {i}: wrong branch")
    return bad


def check_decompositions(cases: int = 100, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 10)
    bad = []
    for i in range(cases):
        sq, plex, _ = random_plex_instance(rng)
        parts = decompose_plex(plex, sq.n)
        cells = [(r, c) for d in parts for r, c in d.cells()]
        if len(parts) != plex.k or len(set(cells)) != len(cells) or set(cells) != plex.cells:
            bad.append(f"case {i}: bad decomposition")
    return bad


# --- equivalence --------------------------------------------------------------------------


def check_equivalence_relation(cases: int = 200, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 11)
    bad = []
    for i in range(cases):
        a = rand_square(rng, max_n=6)
        if a.m > 4:
            continue
        t1 = rand_transform(rng, a.n, a.m)
        t2 = rand_transform(rng, a.n, a.m)
        b, c = apply_transform(a, t1), apply_transform(apply_transform(a, t1), t2)
        ab, bc, aa = are_equivalent(a, b), are_equivalent(b, c), are_equivalent(a, a)
        if aa is None or ab is None or bc is None:
            bad.append(f"case {i}: missed an equivalence")
            continue
        if aa.replay(a).grid != a.grid:
            bad.append(f"case {i}: reflexive certificate wrong")
        if ab.inverse().replay(b).grid != a.grid:
            bad.append(f"case {i}: inverted certificate wrong")
        if ab.then(bc).replay(a).grid != c.grid:
            bad.append(f"case {i}: composed certificate wrong")
        if canonical_key(a) != canonical_key(c):
            bad.append(f"case {i}: canonical keys differ on equivalent squares")
        other = rand_square(random.Random(i), max_n=6)
        if (other.n, other.m, other.lam) == (a.n, a.m, a.lam):
            same_key = canonical_key(a) == canonical_key(other)
            cert = are_equivalent(a, other)
            if same_key != (cert is not None):
                bad.append(f"case {i}: key equality disagrees with are_equivalent")
            if cert is not None and cert.replay(a).grid != other.grid:
                bad.append(f"case {i}: certificate does not replay")
    return bad


def check_existence_class_invariant(cases: int = 200, seed: int = SEED) -> list[str]:
    rng = random.Random(seed + 12)
    bad = []
    for i in range(cases):
        sq = rand_square(rng, max_n=8)
        t = rand_transform(rng, sq.n, sq.m)
        a, b = find_exact(sq), find_exact(apply_transform(sq, t))
        if a.status != b.status:
            bad.append(f"case {i}: {a.status.value} vs {b.status.value}")
    return bad


# --- verify --------------------------------------------------------------------------------


def check_report_reproducible(samples: int = 50, seed: int = SEED) -> list[str]:
    bad = []
    r1 = check_conjecture(4, 2, samples=samples, seed=seed)
    r2 = check_conjecture(4, 2, samples=samples, seed=seed)
    if r1.violations != r2.violations or r1.total_checked != r2.total_checked:
        bad.append("conjecture run not reproducible")
    s1 = check_theorem_m3(3, samples=samples, seed=seed)
    s2 = check_theorem_m3(3, samples=samples, seed=seed)
    if s1.violations != s2.violations or s1.total_checked != s2.total_checked:
        bad.append("m3 run not reproducible")
    return bad


# --- cli -------------------------------------------------------------------------------------


def _cli(argv: list[str]) -> tuple[int, str]:
    import io

    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue()


def check_cli_determinism() -> list[str]:
    bad = []
    for argv in (
        ["gen", "rand:3:2:11"],
        ["find", "rand:3:3:5"],
        ["find", "A:2", "--algorithm", "descent"],
        ["verify", "m3", "--lambda", "3", "--samples", "20"],
    ):
        a, b = _cli(argv), _cli(argv)
        if a != b:
            bad.append(f"{' '.join(argv)}: output differs between runs")
    return bad


def check_cli_round_trip() -> list[str]:
    bad = []
    for spec in ("A:1", "A:3", "B:5", "B:3x2", "rand:4:2:9", "rand:2:3:1:0"):
        code, text = _cli(["gen", spec])
        if code != 0:
            bad.append(f"gen {spec} exited {code}")
            continue
        try:
            formats.parse_grid(text)
        except ValueError as exc:
            bad.append(f"gen {spec}: {exc}")
        code, text = _cli(["gen", spec, "--format", "structured"])
        try:
            formats.loads_square(text)
        except ValueError as exc:
            bad.append(f"gen {spec} structured: {exc}")
    return bad


PROPERTY_CHECKS = {
    "core: transform round trip (1000)": lambda: check_transform_round_trip(1000),
    "core: balance transport + count sums (1000)": lambda: check_balance_transport(1000),
    "core: validate vs naive recount": lambda: check_validate_matches_recount(2000),
    "constructions: A parity vs exact finder": check_A_parity,
    "constructions: Delta cells n<=6, lambda<=3": check_delta_cells,
    "constructions: merge transport (500)": lambda: check_merge_transport(500),
    "constructions: blow_up validates, identity at 1": check_blow_up,
    "constructions: plex blow-up balanced (100)": lambda: check_plex_blow_up(100),
    "search: exact vs naive (200)": lambda: check_exact_vs_naive(200),
    "search: finder soundness, descent never absent": check_descent_soundness,
    "search: incremental objective (10^4 moves)": lambda: check_incremental_objective(10_000),
    "search: m2 certificates replay": check_m2_certificates,
    "search: plex decompositions": check_decompositions,
    "equivalence: relation laws + certificates (200)": lambda: check_equivalence_relation(200),
    "equivalence: existence constant on classes (200)": lambda: check_existence_class_invariant(200),
    "verify: reports reproducible": check_report_reproducible,
    "cli: deterministic output": check_cli_determinism,
    "cli: printed grids re-parse": check_cli_round_trip,
}
