import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from tandem_polling import NetworkParams  # noqa: E402

settings.register_profile(
    "default", max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def table2_top():
    """lambda = 1, mu = 4 at both stations, setups at rate 5, N = 3."""
    return NetworkParams.symmetric(1.0, 4.0, 4.0, 5.0, 3)


@pytest.fixture
def asymmetric():
    return NetworkParams(0.7, 1.3, 2.0, 3.5, 2.9, 4.1, 4.0, 6.0, 2, 3)


# --- acceptance reporting ---------------------------------------------------

ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record ``(number, passed, detail)`` for the acceptance summary."""

    def record(number, passed, detail):
        ACCEPTANCE[number] = (bool(passed), detail)
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})"
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
