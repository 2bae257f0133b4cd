import pytest

from finfet_mc.experiments import preset
from finfet_mc.params import defaults

# (criterion id, passed, detail) lines collected by test_acceptance.py
ACCEPTANCE_LOG = []


@pytest.fixture
def bundle():
    return defaults()


@pytest.fixture
def physio():
    return preset("physiological")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in ACCEPTANCE_LOG:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {cid}: {detail}")
