"""Acceptance gate: every numbered criterion must pass at its pinned tolerance.

Each test runs one registered criterion end to end.  On failure the assertion
message carries the criterion's own diagnostic line, so a red run names the
measured quantity that missed its bound.
"""

import pytest

from curvops.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize(
    "number,name",
    [(num, name) for num, name, _ in CRITERIA],
    ids=[f"{num:02d}-{name.replace(' ', '-')}" for num, name, _ in CRITERIA],
)
def test_criterion(number, name):
    result = run_criterion(number)
    assert result.passed, result.line()


def test_registry_is_complete():
    assert [num for num, _, _ in CRITERIA] == list(range(1, 13))
