from pathlib import Path

import numpy as np
import pytest

from lexiplan.documents import parse_document
from lexiplan.model import MdpInstance, validate

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

ACCEPTANCE_LINES: list[str] = []


def load_doc(name: str):
    return parse_document((DATA / f"{name}.json").read_text())


def two_action():
    """s0 --a0--> e1, s0 --a1--> e2, horizon 1."""
    P = np.zeros((3, 2, 3))
    P[0, 0, 1] = 1.0
    P[0, 1, 2] = 1.0
    P[1, :, 1] = 1.0
    P[2, :, 2] = 1.0
    return validate(MdpInstance(3, 2, 1, P, [1, 2], [1.0, 0.0, 0.0], name="two_action"))


def all_timeout(horizon=3):
    P = np.zeros((3, 2, 3))
    P[0, :, 0] = 1.0
    P[1, :, 1] = 1.0
    P[2, :, 2] = 1.0
    return validate(MdpInstance(3, 2, horizon, P, [1, 2], [1.0, 0.0, 0.0], name="all_timeout"))


def random_policy(instance, rng):
    return rng.integers(0, instance.num_actions, size=(instance.horizon, instance.num_states))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
