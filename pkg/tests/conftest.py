import functools

import pytest

from fourierpulse.search import SearchOptions, gradient_search, greedy_search, heuristic_design

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@functools.lru_cache(maxsize=None)
def cached_design(method: str, selection: str, n: int):
    """Default-option designs, shared across test modules (searches take seconds)."""
    if selection == "heuristic":
        return heuristic_design(method, n)
    if selection == "greedy":
        return greedy_search(method, n, options=SearchOptions())
    return gradient_search(method, n, options=SearchOptions())


@pytest.fixture(scope="session")
def designs():
    return cached_design


@pytest.fixture
def record_criterion():
    """Record a pass/fail verdict with a one-line detail for the acceptance summary."""

    def record(name: str, passed: bool, detail: str = ""):
        ACCEPTANCE_RESULTS[name] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[0][2:])):
        passed, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
