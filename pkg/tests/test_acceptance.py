"""Acceptance checks at their full sizes, exact arithmetic, fixed seed."""

import io
import json

import pytest

from rftorsion.cli import run
from rftorsion.suite import DEFAULT_SEED

RESULT_LINES = []


@pytest.fixture(scope="module")
def suite_report():
    out = io.StringIO()
    code = run(["verify-suite", "--seed", str(DEFAULT_SEED), "--json"], out, io.StringIO())
    report = json.loads(out.getvalue())
    report["exit_code"] = code
    return {c["criterion"]: c for c in report["criteria"]} | {"_report": report}


def test_suite_exit_code(suite_report):
    assert suite_report["_report"]["exit_code"] == 0
    assert suite_report["_report"]["seed"] == DEFAULT_SEED


@pytest.mark.parametrize("number", range(1, 13))
def test_criterion(suite_report, number):
    c = suite_report[number]
    line = f"criterion {number:2d} {'PASS' if c['passed'] else 'FAIL'}  {c['title']}"
    RESULT_LINES.append(line)
    print(line)
    assert c["passed"], json.dumps(c["details"], indent=2)
