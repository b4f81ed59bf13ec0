"""Acceptance criteria at their stated tolerances.

QGV_PROFILE=extended runs the larger sizes (criterion 8 up to degree 8).
"""

import os

import pytest

from qgverify.suite import CRITERIA, run_criterion

PROFILE = os.environ.get("QGV_PROFILE", "ci")


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, acceptance_lines):
    result = run_criterion(number, PROFILE)
    acceptance_lines[number] = result.line
    print(result.line)
    assert result.passed, result.error or result.detail
