"""Shared, cached builds of the expensive doctrines."""
from functools import lru_cache

import pytest

from eqcompletion.completions import complete_gr, complete_q, complete_x, eqc
from eqcompletion.examples import blur, finset_sub


@lru_cache(maxsize=None)
def fs(n: int):
    return finset_sub(n)


@lru_cache(maxsize=None)
def q_of_fs(n: int):
    return complete_q(fs(n))


@lru_cache(maxsize=None)
def gr_of_fs(n: int):
    return complete_gr(fs(n))


@lru_cache(maxsize=None)
def eqc_of_fs(n: int):
    return eqc(fs(n), gr=gr_of_fs(n))


@lru_cache(maxsize=None)
def x_of_blur():
    return complete_x(blur())


@pytest.fixture(scope="session")
def fs4():
    return fs(4)


# one line per acceptance criterion, printed at the end of the run
CRITERIA: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, note = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {note}")
