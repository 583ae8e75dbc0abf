import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("reslab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("reslab")

# acceptance tests record "CRITERION k: PASS/FAIL ..." lines here
ACCEPTANCE_LINES = {}


def record(key, passed, detail):
    line = f"CRITERION {key}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[key] = line
    print(line)
    return passed


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(str(k).split(".")[0]), str(k))):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
