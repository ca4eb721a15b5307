from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from freqsq import validate  # noqa: E402

# Completed 6x6 F(6;2,2,2) square; the diagonal below balances it.
SIX_BY_SIX = validate(
    [
        [1, 1, 2, 3, 2, 3],
        [1, 2, 3, 2, 1, 3],
        [2, 3, 3, 2, 1, 1],
        [3, 1, 2, 3, 2, 1],
        [2, 3, 1, 1, 3, 2],
        [3, 2, 1, 1, 3, 2],
    ],
    3,
    2,
)
SIX_BY_SIX_SIGMA = (2, 5, 3, 4, 1, 6)

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
