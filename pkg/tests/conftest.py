import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA: dict[int, tuple[str, str, str]] = {}


def pytest_runtest_logreport(report):
    # one PASS/FAIL line per acceptance criterion, printed after the run
    marker = dict(report.user_properties).get("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, title = marker
    detail = dict(report.user_properties).get("detail", "")
    _CRITERIA[number] = ("PASS" if report.passed else "FAIL", title, detail)


@pytest.fixture(autouse=True)
def _criterion_properties(request, record_property):
    marker = request.node.get_closest_marker("criterion")
    if marker is not None:
        record_property("criterion", marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        verdict, title, detail = _CRITERIA[number]
        line = f"{verdict} criterion {number:2d}  {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
