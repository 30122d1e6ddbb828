from __future__ import annotations

import random

import pytest

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def record():
    def _record(number: int, passed: bool, detail: str):
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"ACCEPTANCE {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        tr.write_line(f"  [{number:2d}] {'PASS' if passed else 'FAIL'}  {detail}")
    failed = [n for n, (ok, _) in ACCEPTANCE.items() if not ok]
    tr.write_line(f"  {len(ACCEPTANCE) - len(failed)}/{len(ACCEPTANCE)} criteria pass")
