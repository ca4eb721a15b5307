"""Text and structured (JSON) serialization.

Text grid format::

    n m lambda
    a11 a12 ... a1n
    ...

Structured format is a JSON object with ``n``, ``m``, ``lambda`` and ``grid``.
Diagonals, plexes and transforms are written 1-based.
"""

from __future__ import annotations

import json
from typing import Any, Iterable

from .core import Diagonal, FrequencySquare, Transform, validate
from .errors import DimensionMismatch


def format_grid(square: FrequencySquare) -> str:
    lines = [f"{square.n} {square.m} {square.lam}"]
    lines += [" ".join(str(x) for x in row) for row in square.grid]
    return "\n".join(lines) + "\n"


def parse_grid(text: str) -> FrequencySquare:
    lines = [ln.split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
    if not lines or len(lines[0]) != 3:
        raise DimensionMismatch("missing 'n m lambda' header line")
    n, m, lam = (int(x) for x in lines[0])
    body = lines[1:]
    if len(body) != n:
        raise DimensionMismatch(f"header says n={n} but {len(body)} grid rows follow")
    return validate([[int(x) for x in row] for row in body], m, lam)


def annotate(square: FrequencySquare, d: Diagonal) -> str:
    """Grid text with the diagonal's cells bracketed, one row per line."""
    width = len(str(square.m))
    out = []
    for r, row in enumerate(square.grid):
        cells = []
        for c, x in enumerate(row):
            cells.append(f"[{x:>{width}}]" if d.sigma[r] == c else f" {x:>{width}} ")
        out.append("".join(cells).rstrip())
    return "\n".join(out) + "\n"


def square_to_dict(square: FrequencySquare) -> dict[str, Any]:
    return {"n": square.n, "m": square.m, "lambda": square.lam, "grid": square.to_lists()}


def square_from_dict(doc: dict[str, Any]) -> FrequencySquare:
    sq = validate(doc["grid"], int(doc["m"]), int(doc["lambda"]))
    if "n" in doc and int(doc["n"]) != sq.n:
        raise DimensionMismatch(f"document says n={doc['n']} but grid has {sq.n} rows")
    return sq


def dumps_square(square: FrequencySquare) -> str:
    return json.dumps(square_to_dict(square))


def loads_square(text: str) -> FrequencySquare:
    """Parse either format, sniffing JSON by its leading brace."""
    if text.lstrip().startswith("{"):
        return square_from_dict(json.loads(text))
    return parse_grid(text)


def diagonal_to_list(d: Diagonal) -> list[int]:
    return list(d.one_based())


def diagonal_from_list(sigma: Iterable[int]) -> Diagonal:
    return Diagonal.from_one_based(sigma)


def transform_to_dict(t: Transform) -> dict[str, Any]:
    return {
        "rowPerm": [x + 1 for x in t.row_perm],
        "colPerm": [x + 1 for x in t.col_perm],
        "symbolPerm": [x + 1 for x in t.symbol_perm],
        "transposed": t.transposed,
    }


def transform_from_dict(doc: dict[str, Any]) -> Transform:
    return Transform(
        tuple(x - 1 for x in doc["rowPerm"]),
        tuple(x - 1 for x in doc["colPerm"]),
        tuple(x - 1 for x in doc["symbolPerm"]),
        bool(doc["transposed"]),
    )
