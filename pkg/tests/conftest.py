from __future__ import annotations

import itertools

import pytest
from hypothesis import settings

from qindex.qtable import get_table

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


def all_strings(n: int):
    """Every binary string of length n as a tuple of ints."""
    return itertools.product((0, 1), repeat=n)


@pytest.fixture(scope="session")
def table():
    """Tables are cached by get_table; the fixture just names the call."""
    return get_table


@pytest.fixture(scope="session")
def t4096():
    return get_table(4096, 32)


#: (number, title, passed, detail) rows filled in by test_acceptance
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {title}: {detail}")
