import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=60,
)
settings.load_profile("default")


def random_integer_set(seed: int, size: int, upper: int = 4000) -> list[int]:
    """Deterministic duplicate-free sample of [1, upper]."""
    rng = random.Random(seed)
    return sorted(rng.sample(range(1, upper + 1), size))


@pytest.fixture
def rng():
    return random.Random(20260816)


# ---------------------------------------------------------------------------
# the acceptance checklist prints one line per criterion at the end of
# the run, whether or not stdout capture is on

_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
