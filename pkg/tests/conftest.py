import functools

import pytest
from hypothesis import HealthCheck, settings

from hallplanes import field_plane, hall_plane

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1)]


@functools.lru_cache(maxsize=None)
def hall(p, k=1):
    return hall_plane(p, k)


@functools.lru_cache(maxsize=None)
def field(p, k=1):
    return field_plane(p, k)


@pytest.fixture(scope="session")
def hall9():
    return hall(3)


@pytest.fixture(scope="session")
def hall16():
    return hall(2, 2)


@pytest.fixture(scope="session")
def hall25():
    return hall(5)


@pytest.fixture(scope="session")
def field9():
    return field(3)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
