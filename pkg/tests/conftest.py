import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from coalgmin.formats import parse_coalg_text  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

# Example systems, 0-based (state i here is state i+1 in 1-based numbering).
DFA_TEXT = """\
{F,T} * X * X
0: (F, 1, 2)
1: (F, 3, 2)
2: (F, 4, 2)
3: (T, 4, 3)
4: (T, 3, 3)
"""

TS_TEXT = """\
P(X)
0: {1, 2, 3}
1: {0, 3}
2: {2, 3, 4}
3: {3, 4}
4: {}
"""

MARKOV_TEXT = """\
{F,T} * D(X)
0: (F, {1: 1/3, 2: 2/3})
1: (F, {1: 1/2, 3: 1/2})
2: (F, {1: 1/4, 3: 1/2, 4: 1/4})
3: (T, {3: 1})
4: (F, {2: 1/2, 3: 1/2})
"""


@pytest.fixture
def dfa():
    return parse_coalg_text(DFA_TEXT)


@pytest.fixture
def ts():
    return parse_coalg_text(TS_TEXT)


@pytest.fixture
def markov():
    return parse_coalg_text(MARKOV_TEXT)


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        _ACCEPTANCE.append((number, ok, detail))
        assert ok, f"criterion {number} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
