from __future__ import annotations

from pathlib import Path

import pytest

from fracframes.io import load_candidate

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, list[str]] = {}
_titles: dict[int, str] = {}


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


def load(name: str):
    return load_candidate(fixture_path(name))[0]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    _titles.setdefault(n, mark.kwargs.get("title", ""))
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _criteria.setdefault(n, []).append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok = all(o == "passed" for o in _criteria[n])
        terminalreporter.write_line(
            f"criterion {n}: {'PASS' if ok else 'FAIL'}  {_titles.get(n, '')}")
