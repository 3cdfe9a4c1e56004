"""The thirteen acceptance criteria, one test each.

Every run prints a ``criterion NN [PASS|FAIL] ...`` line; the lines are also
collected and repeated in the terminal summary.
"""

from __future__ import annotations

import pytest

from discrepancy_lab.acceptance import CRITERIA, run_criterion

RESULTS: list[str] = []


@pytest.mark.slow
@pytest.mark.parametrize("number", [c[0] for c in CRITERIA],
                         ids=[f"criterion_{c[0]:02d}_{c[1].replace(' ', '_')}" for c in CRITERIA])
def test_criterion(number):
    res = run_criterion(number)
    line = res.line()
    RESULTS.append(line)
    print(line)
    assert res.passed, line
