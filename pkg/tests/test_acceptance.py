"""Acceptance criteria, one test each.  Every test records a PASS/FAIL line
that is printed in the terminal summary."""

from __future__ import annotations

import os
import time

import pytest

from freqsq.constructions import make_A, make_B, two_plex_of_B
from freqsq.core import make_plex
from freqsq.plex import decompose_plex, find_k_plex
from freqsq.search import Status, find_exact
from freqsq.verify import Mode, check_B_theorem, check_theorem_m2, check_theorem_m3
from props import PROPERTY_CHECKS, check_exact_vs_naive, check_merge_transport, check_plex_blow_up

WORKERS = max(1, min(8, os.cpu_count() or 1))


def record(log, number: int, title: str, ok: bool, detail: str, t0: float) -> None:
    verdict = "PASS" if ok else "FAIL"
    log.append(f"[{verdict}] criterion {number}: {title} ({detail}; {time.perf_counter() - t0:.1f}s)")


def test_criterion_1_m2_exception_family(acceptance_log):
    t0 = time.perf_counter()
    rep = check_theorem_m2(3, workers=WORKERS)
    s = rep.summary
    ok = (
        rep.ok
        and rep.mode is Mode.EXHAUSTIVE
        and rep.total_checked == s["independent_count"] == 297200
        and s["without_balanced"] == s["a_equivalent"] == s["a_orbit_size"]
    )
    detail = (
        f"{rep.total_checked} squares, {s['without_balanced']} without a balanced diagonal, "
        f"{s['a_equivalent']} A-equivalent, orbit {s['a_orbit_size']}, {len(rep.violations)} violations"
    )
    record(acceptance_log, 1, "F(6;3,3) exceptions are exactly the A_6 class", ok, detail, t0)
    assert ok, rep.violations[:3]


def test_criterion_2_A_parity(acceptance_log):
    t0 = time.perf_counter()
    got = {lam: find_exact(make_A(lam)).status for lam in (1, 2, 3, 4)}
    want = {1: Status.PROVED_ABSENT, 2: Status.FOUND, 3: Status.PROVED_ABSENT, 4: Status.FOUND}
    ok = got == want
    detail = ", ".join(f"lambda={k}: {v.value}" for k, v in got.items())
    record(acceptance_log, 2, "A_{2 lambda} balanced iff lambda even", ok, detail, t0)
    assert ok


def test_criterion_3_m3(acceptance_log):
    t0 = time.perf_counter()
    six = check_theorem_m3(2, workers=WORKERS)
    nine = check_theorem_m3(3, samples=10_000, workers=WORKERS)
    ok = six.ok and nine.ok and nine.total_checked == 10_000
    detail = (
        f"F(6;2,2,2) {six.mode.value.lower()} over {six.total_checked}, "
        f"F(9;3,3,3) sampled {nine.total_checked}, "
        f"{len(six.violations) + len(nine.violations)} violations"
    )
    record(acceptance_log, 3, "every m=3 square has a balanced diagonal", ok, detail, t0)
    assert ok, (six.violations[:3], nine.violations[:3])


def test_criterion_4_B_grid(acceptance_log):
    t0 = time.perf_counter()
    rep = check_B_theorem(12, 12, diagonals=1_000)
    pairs = [(n, lam) for n in range(1, 13) for lam in range(1, 13) if n * lam <= 12]
    ok = rep.ok and rep.total_checked == len(pairs)
    detail = f"{rep.total_checked} (n, lambda) pairs, {len(rep.violations)} violations"
    record(acceptance_log, 4, "B_n(lambda) balanced iff (n-1) lambda even, Delta checks", ok, detail, t0)
    assert ok, rep.violations


def test_criterion_5_plex_facts(acceptance_log):
    t0 = time.perf_counter()
    problems = []
    for n in range(1, 8):
        has = find_k_plex(make_B(n), 1) is not None
        if has != (n % 2 == 1):
            problems.append(f"B_{n} transversal={has}")
    if find_k_plex(make_B(4), 2) is None:
        problems.append("B_4 has no 2-plex")
    if find_k_plex(make_B(4), 3) is not None:
        problems.append("B_4 has a 3-plex")
    for n in (2, 4, 6, 8):
        plex = two_plex_of_B(n)
        make_plex(make_B(n), plex.cells, 2)
        if len(decompose_plex(plex, n)) != 2:
            problems.append(f"two_plex_of_B({n}) does not split")
    ok = not problems
    record(acceptance_log, 5, "plex facts for B_n", ok, "; ".join(problems) or "all hold", t0)
    assert ok, problems


def test_criterion_6_plex_blow_up(acceptance_log):
    t0 = time.perf_counter()
    bad = check_plex_blow_up(100)
    record(acceptance_log, 6, "plex blow-up gives balanced diagonals", not bad, f"100 instances, {len(bad)} failures", t0)
    assert not bad, bad[:5]


def test_criterion_7_merge(acceptance_log):
    t0 = time.perf_counter()
    bad = check_merge_transport(500)
    record(acceptance_log, 7, "transversals stay balanced after merging", not bad, f"500 squares x 2 merges, {len(bad)} failures", t0)
    assert not bad, bad[:5]


def test_criterion_8_property_suites(acceptance_log):
    t0 = time.perf_counter()
    failed = {}
    for name, check in PROPERTY_CHECKS.items():
        bad = check()
        if bad:
            failed[name] = bad[:3]
    naive = check_exact_vs_naive(200)
    if naive:
        failed["exact vs naive"] = naive[:3]
    ok = not failed
    detail = f"{len(PROPERTY_CHECKS) + 1} suites, failing: {sorted(failed) or 'none'}"
    record(acceptance_log, 8, "property suites", ok, detail, t0)
    assert ok, failed


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
