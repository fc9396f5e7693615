"""The ten acceptance criteria at full size, one pass/fail line each.

Set SYMSPACE_SEED to vary the random trials; the default seed is 0.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from symspace.acceptance import CRITERIA
from symspace.cli import _default_seed


@pytest.mark.parametrize("criterion", CRITERIA, ids=[fn.__name__ for fn in CRITERIA])
def test_criterion(criterion):
    res = criterion(_default_seed(), None)
    line = res.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert res.passed, res.detail
