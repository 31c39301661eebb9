from __future__ import annotations

import contextlib

import pytest

_VERDICTS: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion():
    """Context manager that records PASS/FAIL for one acceptance criterion."""

    @contextlib.contextmanager
    def record(number: int, title: str):
        _VERDICTS[number] = ("FAIL", title)
        yield
        _VERDICTS[number] = ("PASS", title)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        verdict, title = _VERDICTS[number]
        terminalreporter.write_line(f"criterion {number} {verdict}: {title}")
