import re

import pytest

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """record(ok, detail) stores and prints the acceptance line, then asserts.

    The criterion number comes from the test name (test_criterion_NN_...).
    A test that raises before recording is reported as FAIL.
    """
    n = int(re.match(r"test_criterion_(\d+)", request.node.name).group(1))

    def record(ok, detail):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[n] = line
        print(line)
        assert ok, line

    yield record
    if n not in ACCEPTANCE:
        ACCEPTANCE[n] = f"criterion {n:2d}: FAIL  raised before a verdict"
        print(ACCEPTANCE[n])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
