"""Command-line front end: ``freqsq gen|find|plex|equiv|verify|delta``.

Exit status: 0 success (or claim held), 2 claim violated, 3 guard or budget
exceeded, 64 usage error, 66 unreadable input file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import constructions, formats, verify
from .core import FrequencySquare
from .equivalence import are_equivalent
from .errors import BudgetExhausted, FrequencySquareError, ParityPreconditionFailed, TooLarge
from .plex import decompose_plex, find_k_plex
from .search import Status, find_balanced, find_exact, swap_descent

EX_OK, EX_VIOLATED, EX_GUARD, EX_USAGE, EX_NOINPUT = 0, 2, 3, 64, 66
DEFAULT_SEED = verify.DEFAULT_SEED
BUDGET_ENV = "FREQSQ_BUDGET"


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2
        raise UsageError(message)


def _load(spec: str) -> tuple[FrequencySquare, bool]:
    """Square from a constructor name or a file; flag says whether it was random."""
    if spec.split(":", 1)[0] in ("A", "B", "rand") and not Path(spec).exists():
        try:
            return constructions.parse_named(spec), spec.startswith("rand:")
        except (ValueError, FrequencySquareError) as exc:
            raise UsageError(str(exc)) from exc
    try:
        text = Path(spec).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {spec}: {exc.strerror or exc}") from exc
    try:
        return formats.loads_square(text), False
    except (ValueError, KeyError, FrequencySquareError) as exc:
        raise InputError(f"{spec}: {exc}") from exc


def _default_budget() -> int | None:
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"{BUDGET_ENV} must be an integer") from exc


def _emit_square(sq: FrequencySquare, fmt: str, out: TextIO) -> None:
    if fmt == "structured":
        out.write(formats.dumps_square(sq) + "\n")
    else:
        out.write(formats.format_grid(sq))


def _cmd_gen(args, out: TextIO) -> int:
    sq, rnd = _load(args.spec)
    if rnd and args.format == "grid":
        out.write(f"# seed {args.spec.split(':')[3]}\n")
    _emit_square(sq, args.format, out)
    return EX_OK


def _cmd_find(args, out: TextIO) -> int:
    sq, rnd = _load(args.square)
    budget = args.budget if args.budget is not None else _default_budget()
    if args.algorithm == "exact":
        outcome = find_exact(sq, budget)
    elif args.algorithm == "descent":
        outcome = swap_descent(sq, args.seed, args.restarts)
    else:
        outcome = find_balanced(sq, args.seed, args.restarts, budget)
    if args.format == "structured":
        doc = outcome.to_dict()
        if not args.timing:
            del doc["elapsed_ms"]
        if args.algorithm != "exact":
            doc["seed"] = args.seed
        out.write(json.dumps(doc, sort_keys=True) + "\n")
        return EX_OK
    if args.algorithm != "exact" or rnd:
        out.write(f"# seed {args.seed}\n")
    label = {Status.FOUND: "FOUND", Status.PROVED_ABSENT: "ABSENT", Status.UNKNOWN: "UNKNOWN"}
    out.write(label[outcome.status] + "\n")
    if outcome.witness is not None:
        out.write("sigma " + " ".join(str(c) for c in outcome.witness.one_based()) + "\n")
        out.write(formats.annotate(sq, outcome.witness))
    return EX_OK


def _cmd_plex(args, out: TextIO) -> int:
    sq, _ = _load(args.square)
    budget = args.budget if args.budget is not None else _default_budget()
    if sq.lam != 1:
        raise UsageError("plexes are defined on Latin squares only")
    if not 1 <= args.k <= sq.n:
        raise UsageError(f"--k must lie in 1..{sq.n}")
    plex = find_k_plex(sq, args.k, budget)
    if plex is None:
        out.write("NONE\n")
        return EX_OK
    parts = decompose_plex(plex, sq.n) if args.decompose else []
    if args.format == "structured":
        doc = {"k": plex.k, "cells": [[r + 1, c + 1] for r, c in plex.sorted_cells()]}
        if args.decompose:
            doc["diagonals"] = [list(d.one_based()) for d in parts]
        out.write(json.dumps(doc) + "\n")
        return EX_OK
    out.write(f"FOUND {plex.k}-plex\n")
    out.write(" ".join(f"({r + 1},{c + 1})" for r, c in plex.sorted_cells()) + "\n")
    for i, d in enumerate(parts, 1):
        out.write(f"diagonal {i}: " + " ".join(str(c) for c in d.one_based()) + "\n")
    return EX_OK


def _cmd_equiv(args, out: TextIO) -> int:
    a, _ = _load(args.a)
    b, _ = _load(args.b)
    cert = are_equivalent(a, b)
    if args.format == "structured":
        doc = {"equivalent": cert is not None}
        if cert is not None:
            doc["certificate"] = formats.transform_to_dict(cert.transform)
        out.write(json.dumps(doc) + "\n")
        return EX_OK
    if cert is None:
        out.write("NOT EQUIVALENT\n")
        return EX_OK
    t = formats.transform_to_dict(cert.transform)
    out.write("EQUIVALENT\n")
    for key in ("rowPerm", "colPerm", "symbolPerm"):
        out.write(f"{key} " + " ".join(str(x) for x in t[key]) + "\n")
    out.write(f"transposed {str(t['transposed']).lower()}\n")
    return EX_OK


def _cmd_verify(args, out: TextIO) -> int:
    target = args.target
    lam = args.lam
    if target == "m2":
        rep = verify.check_theorem_m2(lam or 1, workers=args.workers, force=args.force)
    elif target == "m3":
        rep = verify.check_theorem_m3(
            lam or 1, samples=args.samples or 10_000, seed=args.seed, workers=args.workers
        )
    elif target == "bgrid":
        rep = verify.check_B_theorem(args.nmax, args.lmax, seed=args.seed, force=args.force)
    elif target == "conjecture":
        if args.m is None or lam is None:
            raise UsageError("verify conjecture needs --m and --lambda")
        rep = verify.check_conjecture(
            args.m, lam, samples=args.samples or 1_000, seed=args.seed, workers=args.workers
        )
    else:
        if args.square:
            sq, _ = _load(args.square)
            rep = verify.check_subarray_bound(sq, force=args.force)
        else:
            rep = verify.check_subarray_bound_sampled(lam or 2, args.samples or 100, args.seed)
    if args.format == "structured":
        doc = rep.to_dict()
        if not args.timing:
            del doc["elapsed_s"]
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        out.write(rep.table())
        if args.timing:
            out.write(f"elapsed     {rep.elapsed_s:.3f}s\n")
    return EX_OK if rep.ok else EX_VIOLATED


def _cmd_delta(args, out: TextIO) -> int:
    n, lam = args.n, args.lam
    if n < 1 or lam < 1:
        raise UsageError("n and lambda must be positive")
    sq = constructions.make_B_blown(n, lam)
    out.write(f"# Delta mod {n} over B_{n}({lam})\n")
    all_zero = True
    for r in range(sq.n):
        vals = []
        for c in range(sq.n):
            res = constructions.delta_value(n, lam, r + 1, c + 1, sq.grid[r][c]).residue
            all_zero &= res == 0
            vals.append(str(res))
        out.write(" ".join(vals) + "\n")
    closed = lam * n * (n + 1) // 2
    out.write(f"cells all 0 mod {n}: {'yes' if all_zero else 'no'}\n")
    out.write(
        f"balanced-diagonal Delta sum = {closed} = {closed % n} mod {n}"
        f" ({'consistent' if closed % n == 0 else 'impossible: no balanced diagonal'})\n"
    )
    return EX_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("grid", "structured"), default="grid")
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument(
        "--timing", action="store_true", help="include elapsed times (output is then not reproducible)"
    )
    p = _Parser(prog="freqsq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="print a named square (A:<l>, B:<n>, B:<n>x<l>, rand:<m>:<l>:<seed>[:steps])")
    g.add_argument("spec")

    f = sub.add_parser("find", parents=[common], help="search for a balanced diagonal")
    f.add_argument("square", help="constructor name or file")
    f.add_argument("--algorithm", choices=("exact", "descent", "auto"), default="auto")
    f.add_argument("--seed", type=int, default=DEFAULT_SEED)
    f.add_argument("--restarts", type=int, default=20)
    f.add_argument("--budget", type=int)

    k = sub.add_parser("plex", parents=[common], help="find a k-plex of a Latin square")
    k.add_argument("square")
    k.add_argument("--k", type=int, required=True)
    k.add_argument("--decompose", action="store_true")
    k.add_argument("--budget", type=int)

    e = sub.add_parser("equiv", parents=[common], help="decide equivalence of two squares")
    e.add_argument("a")
    e.add_argument("b")

    v = sub.add_parser("verify", parents=[common], help="run a theorem or conjecture check")
    v.add_argument("target", choices=("m2", "m3", "bgrid", "conjecture", "subarray-bound"))
    v.add_argument("--lambda", dest="lam", type=int)
    v.add_argument("--m", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--nmax", type=int, default=4)
    v.add_argument("--lmax", type=int, default=3)
    v.add_argument("--square", help="square for subarray-bound")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--force", action="store_true", help="override size guards")

    d = sub.add_parser("delta", parents=[common], help="Delta table and parity obstruction for B_n(lambda)")
    d.add_argument("n", type=int)
    d.add_argument("lam", metavar="lambda", type=int)
    return p


COMMANDS = {
    "gen": _cmd_gen,
    "find": _cmd_find,
    "plex": _cmd_plex,
    "equiv": _cmd_equiv,
    "verify": _cmd_verify,
    "delta": _cmd_delta,
}


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"freqsq: {exc}\n")
        return EX_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    sink = out
    handle = None
    if args.output:
        try:
            handle = open(args.output, "w")
        except OSError as exc:
            err.write(f"freqsq: cannot write {args.output}: {exc.strerror}\n")
            return EX_NOINPUT
        sink = handle
    try:
        return COMMANDS[args.command](args, sink)
    except UsageError as exc:
        err.write(f"freqsq: {exc}\n")
        return EX_USAGE
    except InputError as exc:
        err.write(f"freqsq: {exc}\n")
        return EX_NOINPUT
    except (TooLarge, BudgetExhausted) as exc:
        err.write(f"freqsq: {exc}\n")
        return EX_GUARD
    except (ParityPreconditionFailed, FrequencySquareError) as exc:
        err.write(f"freqsq: {exc}\n")
        return EX_USAGE
    finally:
        if handle is not None:
            handle.close()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
