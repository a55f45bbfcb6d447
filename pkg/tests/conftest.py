from __future__ import annotations

import time

import pytest

_LINES = pytest.StashKey[list]()


class Criterion:
    """Collects one pass/fail line for an acceptance criterion."""

    def __init__(self) -> None:
        self.number: int | None = None
        self.title = ""
        self.line: str | None = None
        self._t0 = 0.0

    def start(self, number: int, title: str) -> None:
        self.number, self.title = number, title
        self._t0 = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._t0

    def done(self, ok: bool, detail: str) -> bool:
        verdict = "PASS" if ok else "FAIL"
        self.line = f"criterion {self.number} {verdict}: {self.title} | {detail} | {self.elapsed:.2f}s"
        print(self.line)
        return ok


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def criterion(request):
    rec = Criterion()
    yield rec
    if rec.number is None:
        return
    if rec.line is None:
        rec.line = f"criterion {rec.number} FAIL: {rec.title} | raised before completing"
    request.config.stash[_LINES].append(rec.line)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
