import numpy as np
import pytest

from subrisk.kernels import BACKENDS


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param



ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
