from pathlib import Path

import pytest

from gaqueens.core import parse_tuple

DATA = Path(__file__).parent / "data"

PUBLISHED_FILES = {
    "solution_50_a": DATA / "solution_50_a.txt",
    "solution_50_b": DATA / "solution_50_b.txt",
    "solution_100": DATA / "solution_100.txt",
}

# (criterion, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE_LOG = []


@pytest.fixture(scope="session")
def published():
    return {name: parse_tuple(path.read_text()) for name, path in PUBLISHED_FILES.items()}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_LOG:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}: {detail}")
