from __future__ import annotations

from pathlib import Path

import pytest

from istarc.dsl import parse

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion covered by the test")
    config._criteria = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = getattr(report, "criterion", None)
    if name is not None:
        report.config_criteria.append((name, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = marker.args[0]
        report.config_criteria = item.config._criteria


def pytest_terminal_summary(terminalreporter, config):
    rows = config._criteria
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in rows:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
    passed = sum(outcome == "passed" for _, outcome in rows)
    terminalreporter.write_line(f"{passed}/{len(rows)} criteria passed")


@pytest.fixture(scope="session")
def travel_text() -> str:
    return (CORPUS / "travel.istar").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def travel_model(travel_text):
    model, warnings = parse(travel_text, "travel.istar")
    assert warnings == []
    return model
