from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
CITIES = ("madrid", "lyon", "vienna", "berlin")

_criteria: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def criterion():
    """Record one acceptance line; the summary is printed at the end of the run."""

    def record(key: str, ok: bool, detail: str):
        _criteria[key] = (bool(ok), detail)
        assert ok, f"{key}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k.split()[1].rstrip(":"))):
        ok, detail = _criteria[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key} {detail}")
