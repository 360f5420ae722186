import contextlib

import pytest

ACCEPTANCE_LOG: list[str] = []


class Criterion:
    def __init__(self, number: int, title: str):
        self.number, self.title, self.detail = number, title, ""

    def note(self, text: str) -> None:
        self.detail = text


@pytest.fixture
def criterion():
    @contextlib.contextmanager
    def record(number: int, title: str):
        c = Criterion(number, title)
        ok = False
        try:
            yield c
            ok = True
        finally:
            status = "PASS" if ok else "FAIL"
            line = f"[{status}] criterion {number:>2}: {title}"
            if c.detail:
                line += f" -- {c.detail}"
            ACCEPTANCE_LOG.append(line)
            print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LOG, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
