"""Acceptance gate: every pinned claim measured at its stated tolerance.

One test per criterion so the run prints one pass/fail line each.  The suite
object is computed once per module; failures carry the expected-vs-measured
text from the criterion itself.
"""

import pytest

from qutritmap.acceptance import run_all

IDS = [
    "1-linear-forward-probability-and-fidelity",
    "2-linear-inverse-probability-and-fidelity",
    "3-linear-u3-end-to-end",
    "4-kerr-forward-both-variants",
    "5-kerr-inverse-and-entangler-determinism",
    "6-kerr-u3-end-to-end",
    "7-property-suites",
    "8-physical-mode-convergence",
]


@pytest.fixture(scope="module")
def suite():
    return {r.number: r for r in run_all()}


@pytest.mark.parametrize("number", range(1, 9), ids=IDS)
def test_criterion(number, suite):
    r = suite[number]
    lines = [f"expected: {r.expected}", f"measured: {r.measured}", *r.details]
    assert r.passed, f"criterion {r.number} ({r.name}) failed\n" + "\n".join(lines)
