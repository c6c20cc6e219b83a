import sys

import pytest

from wittsums.ff import build_field
from wittsums.witt import WittInput


@pytest.fixture(scope="session")
def F2():
    return build_field(2, 1)


@pytest.fixture(scope="session")
def F3():
    return build_field(3, 1)


@pytest.fixture(scope="session")
def F4():
    return build_field(2, 2)


@pytest.fixture(scope="session")
def F9():
    return build_field(3, 2)


def gh_input(field, m, extra=()):
    """f = [x] + sum V^i([c_i x]) with c_i given as (level, dlog) pairs."""
    return WittInput.build(field, m, [(0, (1,), 0)] + [(lvl, (1,), e) for lvl, e in extra])


def diagonal_input(field):
    return WittInput.build(field, 1, [(0, (1, 0), 0), (0, (0, 1), 0), (0, (-1, -1), 0)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
