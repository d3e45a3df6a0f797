import numpy as np
import pytest

_LINES: list[str] = []


class AcceptanceLog:
    """Collects one pass/fail line per acceptance criterion."""

    def record(self, number: int, name: str, ok: bool, detail: str) -> None:
        _LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {name}: {detail}")


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_LINES, key=lambda s: int(s.split()[2])):
        terminalreporter.write_line(line)
