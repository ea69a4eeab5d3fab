from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

GAMES = Path(__file__).resolve().parent.parent / "games"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def games_dir():
    return GAMES


ACCEPTANCE_LINES = []


def record_acceptance(number, title, ok, elapsed, detail=""):
    status = "PASS" if ok else "FAIL"
    extra = f" ({detail})" if detail else ""
    ACCEPTANCE_LINES.append((number, f"[{status}] criterion {number}: {title} in {elapsed:.2f}s{extra}"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
