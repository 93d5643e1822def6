import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from artiplan.instance_io import parse_instance, parse_plan

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


def data_path(name: str) -> Path:
    return DATA / name


@pytest.fixture(scope="session")
def sas_instance():
    return parse_instance((DATA / "sas_kb.lp").read_text())


@pytest.fixture(scope="session")
def sas_plan():
    return parse_plan((DATA / "sas_plan.txt").read_text())


@pytest.fixture(scope="session")
def extended_instance():
    return parse_instance((DATA / "extended.lp").read_text())


@pytest.fixture(scope="session")
def printed_extended_instance():
    return parse_instance((DATA / "extended_printed.lp").read_text())


@pytest.fixture(scope="session")
def saes_plan():
    return parse_plan((DATA / "saes_plan.txt").read_text())


@pytest.fixture(scope="session")
def maes_plan():
    return parse_plan((DATA / "maes_plan.txt").read_text())


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
