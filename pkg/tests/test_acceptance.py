"""Acceptance gate: every criterion at its pinned tolerance.

Each test runs the matching registry check and prints one PASS/FAIL line, so
`pytest tests/test_acceptance.py -s` doubles as a readable report.  The same
checks back the `rgflow verify` subcommand.
"""

import pytest

from rgflow.verify import CHECKS, run_checks

CRITERIA = [
    (1, "gvp-variance"),
    (2, "boundary-exactness"),
    (3, "regression-identity"),
    (4, "manifold-invariance"),
    (5, "kappa-limits"),
    (6, "sampler-euler-agreement"),
    (7, "gaussian-conditional-law"),
    (8, "gradient-check"),
    (9, "training-progress"),
    (10, "sweep-structure"),
    (11, "time-sampler-geometry"),
]

_CHECK_BY_NAME = dict(CHECKS)


@pytest.mark.parametrize("number,name", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, name):
    result = _CHECK_BY_NAME[name]()
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} criterion {number} [{name}]: {result.measured} "
          f"(tolerance: {result.tolerance})")
    assert result.passed, f"criterion {number} [{name}]: {result.measured}"


def test_registry_covers_all_criteria():
    names = {name for name, _ in CHECKS}
    assert {name for _, name in CRITERIA} <= names


def test_run_checks_filter():
    results = run_checks(only="kappa")
    assert [r.name for r in results] == ["kappa-limits"]
