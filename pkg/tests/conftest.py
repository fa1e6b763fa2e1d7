from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import pytest

from helpers import worked_example, write_synthetic

ROOT = Path(__file__).resolve().parents[1]

_criteria: dict[int, list[str]] = defaultdict(list)


@pytest.fixture
def example():
    return worked_example()


@pytest.fixture
def annotated_path() -> Path:
    return ROOT / "data" / "annotated_samples.jsonl"


@pytest.fixture
def synthetic(tmp_path):
    return write_synthetic(tmp_path)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[marker.args[0]].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcomes = _criteria[n]
        if "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {n}: {status} ({len(outcomes)} checks)")
