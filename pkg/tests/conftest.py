import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL = ["Sym(3)", "Sym(4)", "Alt(4)", "Dih(4)", "Dih(5)", "Dih(6)", "Cyc(1)", "Cyc(2)", "Cyc(6)",
         "Cyc(12)", "Pow(Cyc(2),2)", "Pow(Cyc(2),3)", "Dir(Sym(3),Cyc(4))", "Dir(Alt(4),Cyc(2))"]


@pytest.fixture(scope="session")
def small_specs():
    return SMALL


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
