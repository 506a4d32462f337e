import time

import pytest

_results: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        if call.excinfo is None:
            status = "PASS"
        elif call.excinfo.errisinstance(pytest.skip.Exception):
            status = "SKIP"
        else:
            status = "FAIL"
        prev = _results.get(number, ("PASS", title))[0]
        if prev != "FAIL":
            _results[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        status, title = _results[number]
        terminalreporter.write_line(f"criterion {number:>2} {status}  {title}")


@pytest.fixture(scope="session")
def reduced_surveys(tmp_path_factory):
    """p = 5 and p = 7 surveys over N <= 10^6, shared by several criteria."""
    from kummer_rank.survey import SurveyConfig, read_records, run_survey

    out = {}
    for p in (5, 7):
        d = tmp_path_factory.mktemp(f"survey_p{p}")
        t0 = time.perf_counter()
        agg = run_survey(SurveyConfig(p=p, max_n=10**6, output=d))
        out[p] = (agg, read_records(d), time.perf_counter() - t0)
    return out
