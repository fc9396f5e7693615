import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from symspace.padic import PrimeConfig  # noqa: E402


@pytest.fixture(params=[3, 5, 7, 13])
def cfg(request):
    return PrimeConfig(request.param)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
