import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=80,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# filled by test_acceptance, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(12345)


def random_irreducible(rng, n):
    from rauzy.perm_core import is_irreducible_tuple

    while True:
        t = list(range(1, n + 1))
        rng.shuffle(t)
        if is_irreducible_tuple(t):
            return tuple(t)


def random_standard(rng, n):
    from rauzy.perm_core import prepend_one_tuple

    if n == 1:
        return (1,)
    while True:
        t = prepend_one_tuple(random_irreducible(rng, n - 1)) if n > 2 else (1, 2)
        from rauzy.perm_core import is_irreducible_tuple

        if is_irreducible_tuple(t):
            return t
