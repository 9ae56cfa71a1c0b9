import pytest

from rtr.core import fresh_scope


@pytest.fixture(autouse=True)
def _numbered_fresh_names():
    with fresh_scope():
        yield


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
