import time

import pytest

_RESULTS: list[tuple[str, bool, str]] = []


class AcceptanceRecorder:
    """Collects one pass/fail line per acceptance criterion."""

    def __init__(self, name: str):
        self.name = name
        self.detail = ""
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start


@pytest.fixture
def criterion(request):
    rec = AcceptanceRecorder(request.node.name)
    yield rec
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    _RESULTS.append((rec.name, passed, f"{rec.elapsed:.1f}s {rec.detail}".strip()))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(_RESULTS, key=lambda r: int(r[0].split("_")[1])):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {name} ({detail})")
