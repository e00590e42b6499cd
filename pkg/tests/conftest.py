from pathlib import Path

import hypothesis
import numpy as np
import pytest

from momentmatch import specimens

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=400, deadline=None)
hypothesis.settings.load_profile("default")

DATA = Path(__file__).parent / "data"

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, text = marker.args
    if report.when == "call" or report.outcome != "passed":
        prev = _criteria.get(n, (text, "PASS"))[1]
        status = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
        _criteria[n] = (text, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, status = _criteria[n]
        terminalreporter.write_line(f"[{status}] criterion {n:2d}: {text}")


@pytest.fixture
def bernoulli():
    return specimens.bernoulli()


@pytest.fixture
def logistic():
    return specimens.logistic()


@pytest.fixture
def mixture():
    return specimens.mixture()


@pytest.fixture
def cond_mixture():
    return specimens.cond_mixture()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
