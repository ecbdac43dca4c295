from hypothesis import HealthCheck, settings

settings.register_profile(
    "dpq",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.large_base_example,
                           HealthCheck.data_too_large, HealthCheck.filter_too_much],
)
settings.load_profile("dpq")


# one pass/fail line per acceptance criterion at the end of the run
_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion[criterion_" not in report.nodeid:
        return
    n = int(report.nodeid.rsplit("_", 1)[1].rstrip("]"))
    if report.when == "call" or report.failed:
        _criteria[n] = _criteria.get(n, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if _criteria[n] else 'FAIL'}")
