import time
from contextlib import contextmanager

import pytest

_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``with criterion(n, title, max_seconds): ...``."""

    @contextmanager
    def record(number, title, max_seconds):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            _ACCEPTANCE.append(f"FAIL  criterion {number:>2}: {title} ({type(exc).__name__}: {exc})")
            raise
        elapsed = time.perf_counter() - start
        if elapsed >= max_seconds:
            _ACCEPTANCE.append(f"FAIL  criterion {number:>2}: {title} ({elapsed:.2f}s >= {max_seconds}s)")
            pytest.fail(f"criterion {number} took {elapsed:.2f}s, limit {max_seconds}s")
        _ACCEPTANCE.append(f"PASS  criterion {number:>2}: {title} ({elapsed:.2f}s)")

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
