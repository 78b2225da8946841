import math
import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from carplan.geometry import CircleObstacle, State, Workspace  # noqa: E402
from carplan.primitives import MotionModel  # noqa: E402

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def open_model():
    return MotionModel(Workspace(100.0, 100.0))


@pytest.fixture(scope="session")
def small_model():
    return MotionModel(Workspace(50.0, 50.0))


@pytest.fixture(scope="session")
def cluttered_model():
    obs = (CircleObstacle(25, 25, 3.0), CircleObstacle(12, 30, 2.0), CircleObstacle(35, 15, 2.0))
    return MotionModel(Workspace(50.0, 50.0, obs))


def pose(x, y, deg=0.0):
    return State(x, y, math.radians(deg))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(num: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
